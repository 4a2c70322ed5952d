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

#include "heapfacts/context.h"

#include <charconv>
#include <sstream>

#include "heapfacts/errors.h"

namespace heapfacts {
namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::optional<std::uint32_t> parse_order(std::string_view s) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

// A reference field of an enrichment instance. Absent for null or dangling
// values (the latter with a warning).
std::optional<ObjectId> ref_field(const ConcreteObject& o, std::string_view name,
                                  std::vector<std::string>& warnings) {
  const Value* v = o.field(name);
  if (!v || v->kind == Value::Kind::kPrimitive) {
    throw EnricherShapeMismatch(o.type_name + " instance " + hex(o.id) +
                                " has no reference field '" + std::string(name) +
                                "'");
  }
  if (v->kind == Value::Kind::kDangling) {
    warnings.push_back(o.type_name + " " + hex(o.id) + "." + std::string(name) +
                       " points to missing object " + hex(v->ref));
    return std::nullopt;
  }
  if (v->kind == Value::Kind::kNull) return std::nullopt;
  return v->ref;
}

}  // namespace

std::string format_context(const ContextTuple& ctx) {
  std::string out = "[";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) out += ", ";
    out += ctx[i];
  }
  return out + "]";
}

std::string_view flavor_name(Flavor f) {
  switch (f) {
    case Flavor::kInsensitive: return "insensitive";
    case Flavor::kCallSite: return "call-site";
    case Flavor::kObject: return "object";
    case Flavor::kType: return "type";
  }
  return "?";
}

std::optional<SensitivityConfig> SensitivityConfig::parse(std::string_view text) {
  if (text == "insensitive") return SensitivityConfig{};
  auto c1 = text.find(':');
  if (c1 == std::string_view::npos) return std::nullopt;
  auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) return std::nullopt;
  std::string_view name = text.substr(0, c1);
  SensitivityConfig cfg;
  if (name == "call-site") {
    cfg.flavor = Flavor::kCallSite;
  } else if (name == "object") {
    cfg.flavor = Flavor::kObject;
  } else if (name == "type") {
    cfg.flavor = Flavor::kType;
  } else {
    return std::nullopt;
  }
  auto n = parse_order(text.substr(c1 + 1, c2 - c1 - 1));
  auto m = parse_order(text.substr(c2 + 1));
  if (!n || !m) return std::nullopt;
  cfg.n = *n;
  cfg.m = *m;
  return cfg;
}

std::string SensitivityConfig::to_string() const {
  if (flavor == Flavor::kInsensitive) return "insensitive";
  return std::string(flavor_name(flavor)) + ":" + std::to_string(n) + ":" +
         std::to_string(m);
}

std::string DynCallEdge::invocation() const {
  return caller_method + "/" +
         (caller_line ? std::to_string(*caller_line) : std::string("-"));
}

std::set<DynCallEdge> edges_from_traces(const HeapGraph& graph) {
  std::set<DynCallEdge> out;
  for (const auto& [serial, trace] : graph.traces) {
    for (std::size_t i = 0; i + 1 < trace.frames.size(); ++i) {
      const FrameView& callee = trace.frames[i];
      const FrameView& caller = trace.frames[i + 1];
      out.insert({caller.signature(), caller.line, callee.signature(), {}, {}});
    }
  }
  return out;
}

bool matches_enricher_name(std::string_view fq_name, std::string_view configured) {
  if (configured.empty()) return false;
  if (fq_name == configured) return true;
  return fq_name.size() > configured.size() && fq_name.ends_with(configured) &&
         fq_name[fq_name.size() - configured.size() - 1] == '.';
}

EnricherBindings recognize_enrichers(const HeapGraph& graph,
                                     const EnricherNames& names) {
  EnricherBindings b;
  for (const auto& [id, o] : graph.objects) {
    if (o.kind != ObjectKind::kInstance) continue;
    if (matches_enricher_name(o.type_name, names.obj_ctx_class)) {
      b.instrumentation_objects.insert(id);
      auto obj = ref_field(o, "obj", b.warnings);
      auto ctx = ref_field(o, "ctx", b.warnings);
      if (!obj || !ctx) continue;
      auto [it, fresh] = b.obj_ctx.emplace(*obj, *ctx);
      if (!fresh && it->second != *ctx) {
        b.warnings.push_back("object " + hex(*obj) +
                             " has several contexts; keeping " + hex(it->second));
      }
    } else if (matches_enricher_name(o.type_name, names.edge_ctx_class)) {
      b.instrumentation_objects.insert(id);
      EdgeObject e;
      e.edge_obj_id = id;
      e.caller_ctx = ref_field(o, "callerCtx", b.warnings);
      e.callee_ctx = ref_field(o, "calleeCtx", b.warnings);
      e.trace = o.alloc_trace;
      e.degenerate = !e.trace || e.trace->frames.size() < 3;
      b.edge_objs.push_back(std::move(e));
    } else if (matches_enricher_name(o.type_name, names.class_data_class)) {
      b.instrumentation_objects.insert(id);
    }
  }
  return b;
}

std::vector<ConcreteCallEdge> edges_from_edgectx(const EnricherBindings& bindings,
                                                 const HeapGraph& graph,
                                                 std::vector<std::string>* warnings) {
  (void)graph;
  std::vector<ConcreteCallEdge> out;
  for (const auto& e : bindings.edge_objs) {
    if (e.degenerate) {
      if (warnings) {
        warnings->push_back("EdgeCtx " + hex(e.edge_obj_id) +
                            " has fewer than 3 allocation frames; skipped");
      }
      continue;
    }
    const FrameView& callee = e.trace->frames[1];
    const FrameView& caller = e.trace->frames[2];
    out.push_back({caller.signature(), caller.line, callee.signature(),
                   e.caller_ctx, e.callee_ctx, e.edge_obj_id, &*e.trace});
  }
  return out;
}

std::string call_site_component(const FrameView& frame) {
  return frame.signature() + "@" +
         (frame.line ? std::to_string(*frame.line) : std::string("-"));
}

ContextBuilder::ContextBuilder(const HeapGraph& graph,
                               const EnricherBindings& bindings,
                               const AbstractionTable& table,
                               const AbstractionConfig& abs,
                               const SensitivityConfig& cfg)
    : graph_(graph), bindings_(bindings), table_(table), abs_(abs), cfg_(cfg) {}

ContextTuple ContextBuilder::pad(ContextTuple t, std::uint32_t order) const {
  while (t.size() < order) t.emplace_back(kImmutableContext);
  return t;
}

std::string ContextBuilder::alpha(ObjectId obj) const {
  auto it = table_.find(obj);
  if (it == table_.end()) return dummy_key(kUnknownClassName);
  if (cfg_.flavor == Flavor::kType) {
    return it->second.allocator_class.value_or(std::string(kUnknownAllocator));
  }
  return it->second.key;
}

ContextTuple ContextBuilder::chase(std::optional<ObjectId> start,
                                   std::uint32_t order,
                                   std::optional<ObjectId> origin) const {
  ContextTuple out;
  std::set<ObjectId> seen;
  if (origin) seen.insert(*origin);
  std::optional<ObjectId> cur = start;
  while (cur && out.size() < order) {
    if (!seen.insert(*cur).second) {
      throw CycleDetected("context chain revisits object " + hex(*cur));
    }
    out.push_back(alpha(*cur));
    auto next = bindings_.obj_ctx.find(*cur);
    cur = next == bindings_.obj_ctx.end() ? std::nullopt
                                          : std::optional<ObjectId>(next->second);
  }
  return out;
}

ContextTuple ContextBuilder::heap_context(ObjectId obj, std::uint32_t order) const {
  if (cfg_.flavor == Flavor::kInsensitive || order == 0) return {};
  const ConcreteObject* o = graph_.object(obj);
  if (o && abs_.commonplace(o->type_name)) return pad({}, order);

  if (cfg_.flavor == Flavor::kCallSite) {
    auto it = table_.find(obj);
    if (!o || !o->alloc_trace || it == table_.end() || !it->second.alloc_frame) {
      return pad({}, order);
    }
    return call_site_context(*o->alloc_trace, *it->second.alloc_frame, order);
  }

  auto ctx = bindings_.obj_ctx.find(obj);
  if (ctx == bindings_.obj_ctx.end()) return pad({}, order);
  return pad(chase(ctx->second, order, obj), order);
}

ContextTuple ContextBuilder::calling_context(std::optional<ObjectId> r,
                                             std::uint32_t order) const {
  if (cfg_.flavor == Flavor::kInsensitive || order == 0) return {};
  return pad(chase(r, order), order);
}

ContextTuple ContextBuilder::call_site_context(const StackTraceView& trace,
                                               std::size_t index,
                                               std::uint32_t order) const {
  if (cfg_.flavor == Flavor::kInsensitive || order == 0) return {};
  ContextTuple out;
  for (std::size_t i = index + 1; i < trace.frames.size() && out.size() < order;
       ++i) {
    out.push_back(call_site_component(trace.frames[i]));
  }
  return pad(std::move(out), order);
}

}  // namespace heapfacts
