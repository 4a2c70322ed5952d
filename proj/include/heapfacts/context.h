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
// Dynamic call-graph edges and abstract contexts.
//
// Enrichment objects, matched by class-name suffix:
//   ObjAndCtx  { Object obj; Object ctx; }          object -> its receiver
//   EdgeCtx    { Object callerCtx; Object calleeCtx; }  allocated per call;
//              its allocation trace is [EdgeCtx.<init>, callee, caller, ...]
//
// Contexts are fixed-arity tuples; missing components are filled with
// kImmutableContext.

#ifndef HEAPFACTS_CONTEXT_H_
#define HEAPFACTS_CONTEXT_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "heapfacts/abstraction.h"
#include "heapfacts/heap_model.h"

namespace heapfacts {

inline constexpr std::string_view kImmutableContext = "<<immutable-context>>";

using ContextTuple = std::vector<std::string>;

// "[a, b]"; the empty tuple is "[]".
std::string format_context(const ContextTuple& ctx);

enum class Flavor { kInsensitive, kCallSite, kObject, kType };

std::string_view flavor_name(Flavor f);

struct SensitivityConfig {
  Flavor flavor = Flavor::kInsensitive;
  std::uint32_t n = 0;  // calling-context order
  std::uint32_t m = 0;  // heap-context order

  // "insensitive", or "flavor:n:m" with flavor one of call-site, object,
  // type and n, m >= 1. Absent on any other spelling.
  static std::optional<SensitivityConfig> parse(std::string_view text);
  std::string to_string() const;
  bool sensitive() const { return flavor != Flavor::kInsensitive; }
  bool operator==(const SensitivityConfig&) const = default;
};

struct DynCallEdge {
  std::string caller_method;
  std::optional<std::uint32_t> caller_line;
  std::string callee_method;
  ContextTuple caller_ctx;
  ContextTuple callee_ctx;

  // "callerSignature/line", line "-" when unknown.
  std::string invocation() const;
  auto operator<=>(const DynCallEdge&) const = default;
  bool operator==(const DynCallEdge&) const = default;
};

// Every successive frame pair of every stack trace in the dump, frame i+1
// calling frame i. Contexts are empty.
std::set<DynCallEdge> edges_from_traces(const HeapGraph& graph);

struct EnricherNames {
  std::string obj_ctx_class = "heapdl.ObjAndCtx";
  std::string edge_ctx_class = "heapdl.EdgeCtx";
  std::string class_data_class = "heapdl.ClassData";
};

// fq_name equals `configured` or ends with "." + configured.
bool matches_enricher_name(std::string_view fq_name, std::string_view configured);

struct EdgeObject {
  ObjectId edge_obj_id = 0;
  std::optional<ObjectId> caller_ctx;
  std::optional<ObjectId> callee_ctx;
  std::optional<StackTraceView> trace;
  bool degenerate = false;
  bool operator==(const EdgeObject&) const = default;
};

struct EnricherBindings {
  std::map<ObjectId, ObjectId> obj_ctx;
  std::vector<EdgeObject> edge_objs;
  // Ids of the enrichment instances themselves.
  std::set<ObjectId> instrumentation_objects;
  std::vector<std::string> warnings;

  bool empty() const { return obj_ctx.empty() && edge_objs.empty(); }
};

// Throws EnricherShapeMismatch when an instance of a configured class lacks
// the expected reference fields.
EnricherBindings recognize_enrichers(const HeapGraph& graph,
                                     const EnricherNames& names);

struct ConcreteCallEdge {
  std::string caller_method;
  std::optional<std::uint32_t> caller_line;
  std::string callee_method;
  std::optional<ObjectId> caller_ctx;
  std::optional<ObjectId> callee_ctx;
  ObjectId edge_obj_id = 0;
  // The EdgeCtx trace; frame 1 is the callee, frame 2 the caller.
  const StackTraceView* trace = nullptr;
};

// One entry per non-degenerate EdgeCtx, in bindings order. Degenerate
// entries add a warning to `warnings` when given.
std::vector<ConcreteCallEdge> edges_from_edgectx(
    const EnricherBindings& bindings, const HeapGraph& graph,
    std::vector<std::string>* warnings = nullptr);

// Computes abstract contexts for one configuration.
class ContextBuilder {
 public:
  ContextBuilder(const HeapGraph& graph, const EnricherBindings& bindings,
                 const AbstractionTable& table, const AbstractionConfig& abs,
                 const SensitivityConfig& cfg);

  // Heap context of `obj` with `order` components. Object / type flavor:
  // component i is alpha(beta^i(obj)). Call-site flavor: the call sites
  // above the allocating frame. Commonplace objects are all padding.
  // Throws CycleDetected when beta revisits an object.
  ContextTuple heap_context(ObjectId obj, std::uint32_t order) const;

  // Object / type flavor: alpha(r), alpha(beta(r)), ... seeded from the
  // concrete context object `r`; absent `r` is all padding.
  ContextTuple calling_context(std::optional<ObjectId> r,
                               std::uint32_t order) const;

  // Call-site flavor: "sig@line" of frames index+1, index+2, ... of `trace`.
  ContextTuple call_site_context(const StackTraceView& trace, std::size_t index,
                                 std::uint32_t order) const;

  // alpha: object key (object flavor) or allocating class (type flavor).
  std::string alpha(ObjectId obj) const;

  const SensitivityConfig& config() const { return cfg_; }

 private:
  ContextTuple pad(ContextTuple t, std::uint32_t order) const;
  // alpha of `start`, beta(start), ... up to `order` components; `origin`
  // counts as already visited.
  ContextTuple chase(std::optional<ObjectId> start, std::uint32_t order,
                     std::optional<ObjectId> origin = std::nullopt) const;

  const HeapGraph& graph_;
  const EnricherBindings& bindings_;
  const AbstractionTable& table_;
  const AbstractionConfig& abs_;
  SensitivityConfig cfg_;
};

inline constexpr std::string_view kUnknownAllocator = "<unknown allocator>";

// "sig@line" with "-" for an unknown line.
std::string call_site_component(const FrameView& frame);

}  // namespace heapfacts

#endif  // HEAPFACTS_CONTEXT_H_
