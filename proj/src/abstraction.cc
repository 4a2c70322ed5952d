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

#include "heapfacts/abstraction.h"

#include <cstdio>
#include <sstream>

namespace heapfacts {
namespace {

std::set<std::string> skip_types(std::string_view obj_type,
                                 const CodeModel& code,
                                 std::span<const std::string> supertypes) {
  std::set<std::string> out{std::string(obj_type)};
  out.insert(supertypes.begin(), supertypes.end());
  std::string cur(obj_type);
  while (true) {
    auto it = code.superclasses.find(cur);
    if (it == code.superclasses.end() || !out.insert(it->second).second) break;
    cur = it->second;
  }
  return out;
}

bool skipped(const FrameView& f, const std::set<std::string>& ctor_types,
             const AbstractionConfig& cfg) {
  if (f.method_name == "<init>" && ctor_types.contains(f.class_name)) return true;
  return cfg.excluded(f.class_name);
}

const AllocationInstr* best_site(const MethodMeta& m, std::string_view type,
                                 std::optional<std::uint32_t> line) {
  const AllocationInstr* best = nullptr;
  for (const auto& a : m.alloc_instructions) {
    if (a.allocated_type != type) continue;
    if (line && a.line != line) continue;
    if (!best || a.bytecode_index < best->bytecode_index ||
        (a.bytecode_index == best->bytecode_index &&
         a.site_index < best->site_index)) {
      best = &a;
    }
  }
  return best;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

std::string_view abstraction_kind_name(AbstractionKind kind) {
  switch (kind) {
    case AbstractionKind::kAllocSite: return "alloc-site";
    case AbstractionKind::kClassIdentity: return "class-identity";
    case AbstractionKind::kStringIdentity: return "string-identity";
    case AbstractionKind::kMergedString: return "merged-string";
    case AbstractionKind::kDummy: return "dummy";
  }
  return "?";
}

bool AbstractionConfig::excluded(std::string_view class_name) const {
  for (const auto& p : excluded_frame_prefixes) {
    if (class_name.starts_with(p) &&
        (class_name.size() == p.size() || class_name[p.size()] == '.')) {
      return true;
    }
  }
  return false;
}

bool AbstractionConfig::commonplace(std::string_view type_name) const {
  return commonplace_types.contains(std::string(type_name));
}

std::optional<std::size_t> first_surviving_frame(
    const StackTraceView& trace, std::string_view obj_type,
    const CodeModel& code, const AbstractionConfig& cfg,
    std::span<const std::string> supertypes) {
  auto ctor_types = skip_types(obj_type, code, supertypes);
  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    if (!skipped(trace.frames[i], ctor_types, cfg)) return i;
  }
  return std::nullopt;
}

std::optional<FrameMatch> match_allocation_frame(
    const StackTraceView& trace, std::string_view obj_type,
    const CodeModel& code, const AbstractionConfig& cfg,
    std::span<const std::string> supertypes) {
  auto ctor_types = skip_types(obj_type, code, supertypes);
  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    const FrameView& f = trace.frames[i];
    if (skipped(f, ctor_types, cfg)) continue;
    const MethodMeta* m =
        code.find(f.class_name, f.method_name, f.method_descriptor);
    if (!m) continue;
    const AllocationInstr* site = nullptr;
    if (f.line) site = best_site(*m, obj_type, f.line);
    if (!site) site = best_site(*m, obj_type, std::nullopt);
    if (!site) return std::nullopt;
    return FrameMatch{i, f, *site};
  }
  return std::nullopt;
}

std::string alloc_site_key(std::string_view signature_id,
                           std::string_view type_name,
                           std::uint32_t site_index) {
  return std::string(signature_id) + "/new " + std::string(type_name) + "/" +
         std::to_string(site_index);
}

std::string class_key(std::string_view fq_name) {
  return "<class " + std::string(fq_name) + ">";
}

std::string string_key(std::string_view content) {
  std::string out = "<string \"";
  for (unsigned char c : content) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\">";
}

std::string merged_string_key(std::string_view type_name) {
  return "<merged-string " + std::string(type_name) + ">";
}

std::string dummy_key(std::string_view type_name) {
  return "<dynamic " + std::string(type_name) + " (unknown site)>";
}

ObjAbstraction abstract_object(const ConcreteObject& obj, const HeapGraph& graph,
                               const CodeModel& code,
                               const AbstractionConfig& cfg) {
  ObjAbstraction a;
  if (obj.kind == ObjectKind::kClassObject) {
    const ClassInfo* info = graph.class_info(obj.id);
    std::string name = info ? info->fq_name : std::string(kUnknownClassName);
    a.kind = AbstractionKind::kClassIdentity;
    a.type_name = "java.lang.Class";
    a.key = class_key(name);
    if (cfg.distinguish_loaders && info && info->loader_id != 0) {
      a.key = "<class " + name + " loader " + hex(info->loader_id) + ">";
    }
    return a;
  }

  a.type_name = obj.type_name;
  std::vector<std::string> supers = graph.supertypes_of(obj);
  if (obj.alloc_trace) {
    a.alloc_frame = first_surviving_frame(*obj.alloc_trace, obj.type_name,
                                          code, cfg, supers);
  }

  if (obj.kind == ObjectKind::kInstance && obj.type_name == "java.lang.String") {
    std::optional<std::string> content;
    if (cfg.distinguish_strings_by_content) content = decode_string(obj, graph);
    if (content) {
      a.kind = AbstractionKind::kStringIdentity;
      a.key = string_key(*content);
    } else {
      a.kind = AbstractionKind::kMergedString;
      a.key = merged_string_key(obj.type_name);
    }
  } else if (obj.alloc_trace) {
    if (auto m = match_allocation_frame(*obj.alloc_trace, obj.type_name, code,
                                        cfg, supers)) {
      a.kind = AbstractionKind::kAllocSite;
      a.key = alloc_site_key(m->frame.signature(), obj.type_name,
                             m->site.site_index);
      a.alloc_frame = m->frame_index;
    }
  }
  if (a.key.empty()) {
    a.kind = AbstractionKind::kDummy;
    a.key = dummy_key(obj.type_name);
  }
  if (obj.alloc_trace && a.alloc_frame) {
    a.allocator_class = obj.alloc_trace->frames[*a.alloc_frame].class_name;
  }
  return a;
}

AbstractionTable abstraction_table(const HeapGraph& graph, const CodeModel& code,
                                   const AbstractionConfig& cfg) {
  AbstractionTable out;
  for (const auto& [id, obj] : graph.objects) {
    out.emplace(id, abstract_object(obj, graph, code, cfg));
  }
  return out;
}

}  // namespace heapfacts
