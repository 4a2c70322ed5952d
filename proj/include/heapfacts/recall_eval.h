// Copyright 2026 The heapfacts Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Fraction of observed call-graph edges present in a reference edge set.

#ifndef HEAPFACTS_RECALL_EVAL_H_
#define HEAPFACTS_RECALL_EVAL_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace heapfacts {

// Invocation ids have the form "<caller sig>/<line or index>".
struct CallEdge {
  std::string invocation;
  std::string callee;
  auto operator<=>(const CallEdge&) const = default;
};

using EdgeSet = std::set<CallEdge>;

enum class MatchMode { kExact, kMethodPair };

struct RecallResult {
  std::size_t matched = 0;
  std::size_t total = 0;  // distinct observed edges after projection
  // Observed edges absent from the reference, sorted. Method-pair mode
  // reports the projected edge: the caller signature in place of the
  // invocation.
  std::vector<CallEdge> missing;

  double fraction() const { return static_cast<double>(matched) / static_cast<double>(total); }
  // "matched/total"
  std::string ratio() const;
};

// The caller signature of an invocation id: everything before the last '/'.
std::string_view invocation_caller(std::string_view invocation);

// Throws EmptyObserved when `observed` is empty.
RecallResult recall(const EdgeSet& reference, const EdgeSet& observed,
                    MatchMode mode = MatchMode::kMethodPair);

// Edges of a CallGraphEdge.csv in either column layout; contexts are
// dropped. Throws Error on an unrecognized header, IoError if unreadable.
EdgeSet parse_call_graph_edges(std::string_view csv_text);
EdgeSet read_call_graph_edges(const std::filesystem::path& path);

}  // namespace heapfacts

#endif  // HEAPFACTS_RECALL_EVAL_H_
