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
// Call edges enumerated straight from a SynthProgram's traces, and the same
// triples read back from edges_from_traces.

#ifndef HEAPFACTS_TESTS_TRACE_ORACLE_H_
#define HEAPFACTS_TESTS_TRACE_ORACLE_H_

#include <set>
#include <string>
#include <tuple>

#include "heapfacts/context.h"
#include "heapfacts/dump_synth.h"

namespace heapfacts::testing {

// (caller signature, line or "-", callee signature)
using EdgeTriples = std::set<std::tuple<std::string, std::string, std::string>>;

inline EdgeTriples brute_force_edges(const SynthProgram& p) {
  EdgeTriples out;
  for (const auto& t : p.traces()) {
    for (std::size_t i = 1; i < t.size(); ++i) {
      const FrameView& callee = t[i - 1];
      const FrameView& caller = t[i];
      std::string line = caller.line ? std::to_string(*caller.line) : "-";
      out.emplace(*signature_id(caller.class_name, caller.method_name, caller.method_descriptor),
                  line,
                  *signature_id(callee.class_name, callee.method_name, callee.method_descriptor));
    }
  }
  return out;
}

inline EdgeTriples trace_edge_triples(const HeapGraph& g) {
  EdgeTriples got;
  for (const auto& e : edges_from_traces(g)) {
    got.emplace(e.caller_method, e.invocation().substr(e.caller_method.size() + 1),
                e.callee_method);
  }
  return got;
}

}  // namespace heapfacts::testing

#endif  // HEAPFACTS_TESTS_TRACE_ORACLE_H_
