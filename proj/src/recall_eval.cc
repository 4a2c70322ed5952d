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

#include "heapfacts/recall_eval.h"

#include "file_io.h"
#include "heapfacts/csv.h"
#include "heapfacts/errors.h"

namespace heapfacts {
namespace {

EdgeSet project(const EdgeSet& edges, MatchMode mode) {
  if (mode == MatchMode::kExact) return edges;
  EdgeSet out;
  for (const auto& e : edges) {
    out.insert({std::string(invocation_caller(e.invocation)), e.callee});
  }
  return out;
}

}  // namespace

std::string RecallResult::ratio() const {
  return std::to_string(matched) + "/" + std::to_string(total);
}

std::string_view invocation_caller(std::string_view invocation) {
  auto slash = invocation.rfind('/');
  // A '/' inside the signature ends before the closing '>'.
  if (slash == std::string_view::npos || invocation.find('>', slash) != std::string_view::npos) {
    return invocation;
  }
  return invocation.substr(0, slash);
}

RecallResult recall(const EdgeSet& reference, const EdgeSet& observed, MatchMode mode) {
  if (observed.empty()) throw EmptyObserved();
  EdgeSet ref = project(reference, mode);
  EdgeSet obs = project(observed, mode);
  RecallResult r;
  r.total = obs.size();
  for (const auto& e : obs) {
    if (ref.contains(e)) {
      ++r.matched;
    } else {
      r.missing.push_back(e);
    }
  }
  return r;
}

EdgeSet parse_call_graph_edges(std::string_view csv_text) {
  auto rows = parse_csv(csv_text);
  if (rows.empty()) throw Error("CallGraphEdge file has no header");
  std::size_t inv = 0;
  std::size_t callee = 0;
  const CsvRow& header = rows.front();
  if (header == CsvRow{"invocation", "method"}) {
    inv = 0;
    callee = 1;
  } else if (header == CsvRow{"callerCtx", "invocation", "calleeCtx", "method"}) {
    inv = 1;
    callee = 3;
  } else {
    throw Error("unrecognized CallGraphEdge header");
  }
  EdgeSet out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw Error("CallGraphEdge row " + std::to_string(i + 1) + " has " +
                  std::to_string(rows[i].size()) + " fields");
    }
    out.insert({rows[i][inv], rows[i][callee]});
  }
  return out;
}

EdgeSet read_call_graph_edges(const std::filesystem::path& path) {
  return parse_call_graph_edges(internal::read_text_file(path));
}

}  // namespace heapfacts
