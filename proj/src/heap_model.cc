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

#include "heapfacts/heap_model.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace heapfacts {
namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::uint64_t read_be(const std::uint8_t* p, std::size_t n) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v = (v << 8) | p[i];
  return v;
}

Value make_value(BasicType type, std::uint64_t bits) {
  if (type == BasicType::kObject) {
    return bits == 0 ? Value::null() : Value::object(bits);
  }
  return Value::primitive(type, bits);
}

class HeapBuilder {
 public:
  explicit HeapBuilder(const hprof::RawDump& dump) : dump_(dump) {
    graph_.id_size = dump.header.id_size;
    for (const auto& w : dump.warnings) {
      graph_.warnings.push_back("offset " + std::to_string(w.byte_offset) +
                                ": " + w.message);
    }
  }

  HeapGraph build() {
    index_records();
    build_traces();
    const auto subs = dump_.heap_sub_records();
    for (const auto* s : subs) {
      if (const auto* c = std::get_if<hprof::ClassDump>(s)) add_class(*c);
    }
    check_class_hierarchy();
    add_class_objects();
    std::unordered_set<ObjectId> roots_seen;
    for (const auto* s : subs) {
      if (const auto* i = std::get_if<hprof::InstanceDump>(s)) {
        add_instance(*i);
      } else if (const auto* a = std::get_if<hprof::ObjectArrayDump>(s)) {
        add_object_array(*a);
      } else if (const auto* p = std::get_if<hprof::PrimitiveArrayDump>(s)) {
        add_primitive_array(*p);
      } else if (const auto* r = std::get_if<hprof::GcRoot>(s)) {
        if (roots_seen.insert(r->obj_id).second) {
          graph_.gc_roots.push_back(r->obj_id);
        }
      }
    }
    resolve_references();
    index_strings();
    return std::move(graph_);
  }

 private:
  void warn(std::string message) { graph_.warnings.push_back(std::move(message)); }

  std::optional<std::string> text(ObjectId id) const {
    auto it = dump_.strings.find(id);
    if (it == dump_.strings.end()) return std::nullopt;
    return it->second;
  }

  std::string name_or_warn(ObjectId id, std::string_view what) {
    if (auto t = text(id)) return *t;
    warn("missing UTF8 string " + hex(id) + " for " + std::string(what));
    return "<missing " + hex(id) + ">";
  }

  void index_records() {
    for (const auto& r : dump_.records) {
      if (const auto* l = std::get_if<hprof::LoadClass>(&r.body)) {
        class_names_[l->class_obj_id] =
            dotted_name(name_or_warn(l->name_id, "class name"));
        class_serials_[l->class_obj_id] = l->serial;
        serial_to_class_[l->serial] = l->class_obj_id;
      } else if (const auto* f = std::get_if<hprof::StackFrame>(&r.body)) {
        frames_[f->frame_id] = f;
      }
    }
  }

  FrameView make_frame(const hprof::StackFrame& f) {
    FrameView v;
    auto cls = serial_to_class_.find(f.class_serial);
    if (cls != serial_to_class_.end()) {
      v.class_name = class_names_[cls->second];
    } else {
      warn("stack frame " + hex(f.frame_id) + " names unknown class serial " +
           std::to_string(f.class_serial));
      v.class_name = std::string(kUnknownClassName);
    }
    v.method_name = name_or_warn(f.method_name_id, "method name");
    v.method_descriptor = name_or_warn(f.method_sig_id, "method signature");
    if (f.source_file_id != 0) v.source_file = text(f.source_file_id);
    if (f.line > 0) v.line = static_cast<std::uint32_t>(f.line);
    return v;
  }

  void build_traces() {
    std::unordered_map<ObjectId, FrameView> views;
    for (const auto& [id, f] : frames_) views.emplace(id, make_frame(*f));
    for (const auto& r : dump_.records) {
      const auto* t = std::get_if<hprof::StackTrace>(&r.body);
      if (!t) continue;
      StackTraceView v;
      v.serial = t->trace_serial;
      v.thread_serial = t->thread_serial;
      for (ObjectId fid : t->frame_ids) {
        auto it = views.find(fid);
        if (it == views.end()) {
          warn("stack trace " + std::to_string(t->trace_serial) +
               " references missing frame " + hex(fid));
          continue;
        }
        v.frames.push_back(it->second);
      }
      graph_.traces[v.serial] = std::move(v);
    }
  }

  std::optional<StackTraceView> trace_for(std::uint32_t serial) const {
    if (serial == 0) return std::nullopt;
    auto it = graph_.traces.find(serial);
    if (it == graph_.traces.end() || it->second.frames.empty()) {
      return std::nullopt;
    }
    return it->second;
  }

  void add_class(const hprof::ClassDump& c) {
    ClassInfo info;
    info.class_obj_id = c.class_obj_id;
    auto name = class_names_.find(c.class_obj_id);
    if (name != class_names_.end()) {
      info.fq_name = name->second;
      info.serial = class_serials_[c.class_obj_id];
    } else {
      warn("class dump " + hex(c.class_obj_id) + " has no LOAD CLASS record");
      info.fq_name = "<unnamed class " + hex(c.class_obj_id) + ">";
    }
    info.loader_id = c.loader_id;
    if (c.super_id != 0) info.super_ref = c.super_id;
    for (const auto& s : c.static_fields) {
      info.static_fields.push_back(
          {name_or_warn(s.name_id, "static field name"),
           make_value(s.type, s.value)});
    }
    for (const auto& f : c.instance_fields) {
      info.instance_field_layout.emplace_back(
          name_or_warn(f.name_id, "field name"), f.type);
    }
    if (!graph_.classes.emplace(c.class_obj_id, std::move(info)).second) {
      warn("duplicate class dump " + hex(c.class_obj_id));
    }
  }

  void check_class_hierarchy() {
    for (const auto& [id, info] : graph_.classes) {
      std::set<ObjectId> seen{id};
      const ClassInfo* cur = &info;
      while (cur->super_ref) {
        ObjectId next = *cur->super_ref;
        if (!seen.insert(next).second) {
          warn("superclass cycle through " + info.fq_name);
          break;
        }
        const ClassInfo* sup = graph_.class_info(next);
        if (!sup) {
          warn("superclass " + hex(next) + " of " + cur->fq_name +
               " is not in the dump");
          break;
        }
        cur = sup;
      }
    }
  }

  void add_class_objects() {
    ObjectId class_class = 0;
    for (const auto& [id, info] : graph_.classes) {
      if (info.fq_name == "java.lang.Class") class_class = id;
    }
    for (const auto& [id, info] : graph_.classes) {
      ConcreteObject o;
      o.id = id;
      o.kind = ObjectKind::kClassObject;
      o.class_ref = class_class;
      o.type_name = "java.lang.Class";
      graph_.objects.emplace(id, std::move(o));
    }
  }

  void insert(ConcreteObject o) {
    ObjectId id = o.id;
    if (!graph_.objects.emplace(id, std::move(o)).second) {
      warn("duplicate object id " + hex(id));
    }
  }

  void add_instance(const hprof::InstanceDump& d) {
    ConcreteObject o;
    o.id = d.obj_id;
    o.class_ref = d.class_obj_id;
    o.kind = ObjectKind::kInstance;
    o.alloc_trace = trace_for(d.trace_serial);
    const ClassInfo* cls = graph_.class_info(d.class_obj_id);
    if (!cls) {
      warn("instance " + hex(d.obj_id) + " has unknown class " +
           hex(d.class_obj_id));
      o.unknown_class = true;
      o.type_name = std::string(kUnknownClassName);
      insert(std::move(o));
      return;
    }
    o.type_name = cls->fq_name;
    auto chain = graph_.class_chain(d.class_obj_id);
    std::size_t expected = 0;
    for (const auto* c : chain) {
      for (const auto& [name, type] : c->instance_field_layout) {
        expected += basic_type_size(type, graph_.id_size);
      }
    }
    if (expected != d.field_bytes.size()) {
      warn("instance " + hex(d.obj_id) + " of " + cls->fq_name + " has " +
           std::to_string(d.field_bytes.size()) +
           " field bytes but its layout needs " + std::to_string(expected));
      insert(std::move(o));
      return;
    }
    std::size_t pos = 0;
    for (const auto* c : chain) {
      for (const auto& [name, type] : c->instance_field_layout) {
        std::size_t n = basic_type_size(type, graph_.id_size);
        o.fields.push_back(
            {name, make_value(type, read_be(d.field_bytes.data() + pos, n))});
        pos += n;
      }
    }
    insert(std::move(o));
  }

  void add_object_array(const hprof::ObjectArrayDump& d) {
    ConcreteObject o;
    o.id = d.obj_id;
    o.class_ref = d.array_class_id;
    o.kind = ObjectKind::kObjectArray;
    o.alloc_trace = trace_for(d.trace_serial);
    if (const ClassInfo* cls = graph_.class_info(d.array_class_id)) {
      o.type_name = cls->fq_name;
    } else {
      warn("object array " + hex(d.obj_id) + " has unknown array class " +
           hex(d.array_class_id));
      o.unknown_class = true;
      o.type_name = "java.lang.Object[]";
    }
    o.elements.reserve(d.elements.size());
    for (ObjectId e : d.elements) o.elements.push_back(make_value(BasicType::kObject, e));
    insert(std::move(o));
  }

  void add_primitive_array(const hprof::PrimitiveArrayDump& d) {
    ConcreteObject o;
    o.id = d.obj_id;
    o.kind = ObjectKind::kPrimitiveArray;
    o.alloc_trace = trace_for(d.trace_serial);
    o.type_name = std::string(basic_type_name(d.element_type)) + "[]";
    if (auto it = array_classes().find(o.type_name); it != array_classes().end()) {
      o.class_ref = it->second;
    }
    o.element_type = d.element_type;
    o.length = d.count;
    o.primitive_data = d.data;
    insert(std::move(o));
  }

  const std::map<std::string, ObjectId>& array_classes() {
    if (!array_classes_) {
      array_classes_.emplace();
      for (const auto& [id, info] : graph_.classes) {
        if (info.fq_name.ends_with("[]")) array_classes_->emplace(info.fq_name, id);
      }
    }
    return *array_classes_;
  }

  void resolve(Value& v, ObjectId owner) {
    if (v.kind != Value::Kind::kObject) return;
    if (!graph_.objects.contains(v.ref)) {
      warn("object " + hex(owner) + " references missing object " + hex(v.ref));
      v = Value::dangling(v.ref);
    }
  }

  void resolve_references() {
    for (auto& [id, o] : graph_.objects) {
      for (auto& f : o.fields) resolve(f.value, id);
      for (auto& e : o.elements) resolve(e, id);
    }
    for (auto& [id, c] : graph_.classes) {
      for (auto& f : c.static_fields) resolve(f.value, id);
    }
  }

  void index_strings() {
    for (const auto& [id, o] : graph_.objects) {
      if (o.kind != ObjectKind::kInstance || o.type_name != "java.lang.String") {
        continue;
      }
      if (auto s = decode_string(o, graph_, &graph_.warnings)) {
        graph_.strings_by_content[*s].push_back(id);
      }
    }
  }

  const hprof::RawDump& dump_;
  HeapGraph graph_;
  std::unordered_map<ObjectId, std::string> class_names_;
  std::unordered_map<ObjectId, std::uint32_t> class_serials_;
  std::unordered_map<std::uint32_t, ObjectId> serial_to_class_;
  std::map<ObjectId, const hprof::StackFrame*> frames_;
  std::optional<std::map<std::string, ObjectId>> array_classes_;
};

std::optional<std::int64_t> int_field(const ConcreteObject& obj,
                                      std::string_view name) {
  const Value* v = obj.field(name);
  if (!v || v->kind != Value::Kind::kPrimitive) return std::nullopt;
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(v->bits));
}

}  // namespace

std::string FrameView::signature() const {
  if (auto s = signature_id(class_name, method_name, method_descriptor)) {
    return *s;
  }
  return "<" + class_name + ": " + method_name + " " + method_descriptor + ">";
}

const Value* ConcreteObject::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f.value;
  }
  return nullptr;
}

const ConcreteObject* HeapGraph::object(ObjectId id) const {
  auto it = objects.find(id);
  return it == objects.end() ? nullptr : &it->second;
}

const ClassInfo* HeapGraph::class_info(ObjectId id) const {
  auto it = classes.find(id);
  return it == classes.end() ? nullptr : &it->second;
}

std::vector<const ClassInfo*> HeapGraph::classes_named(
    std::string_view fq_name) const {
  std::vector<const ClassInfo*> out;
  for (const auto& [id, c] : classes) {
    if (c.fq_name == fq_name) out.push_back(&c);
  }
  return out;
}

std::vector<const ClassInfo*> HeapGraph::class_chain(ObjectId class_id) const {
  std::vector<const ClassInfo*> out;
  std::set<ObjectId> seen;
  const ClassInfo* cur = class_info(class_id);
  while (cur && seen.insert(cur->class_obj_id).second) {
    out.push_back(cur);
    cur = cur->super_ref ? class_info(*cur->super_ref) : nullptr;
  }
  return out;
}

std::vector<std::string> HeapGraph::supertypes_of(const ConcreteObject& obj) const {
  std::vector<std::string> out;
  if (obj.kind != ObjectKind::kInstance) return out;
  auto chain = class_chain(obj.class_ref);
  for (std::size_t i = 1; i < chain.size(); ++i) out.push_back(chain[i]->fq_name);
  return out;
}

HeapGraph build_heap(const hprof::RawDump& dump) {
  return HeapBuilder(dump).build();
}

std::string utf16_to_utf8(const std::vector<std::uint16_t>& units) {
  std::string out;
  auto put = [&out](std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  };
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::uint32_t u = units[i];
    if (u >= 0xD800 && u <= 0xDBFF && i + 1 < units.size() &&
        units[i + 1] >= 0xDC00 && units[i + 1] <= 0xDFFF) {
      put(0x10000 + ((u - 0xD800) << 10) + (units[i + 1] - 0xDC00));
      ++i;
    } else if (u >= 0xD800 && u <= 0xDFFF) {
      put(0xFFFD);
    } else {
      put(u);
    }
  }
  return out;
}

std::optional<std::string> decode_string(const ConcreteObject& obj,
                                         const HeapGraph& graph,
                                         std::vector<std::string>* warnings) {
  if (obj.kind != ObjectKind::kInstance || obj.type_name != "java.lang.String") {
    return std::nullopt;
  }
  const Value* value = obj.field("value");
  if (!value || value->kind == Value::Kind::kNull) return std::nullopt;
  if (value->kind != Value::Kind::kObject) {
    if (warnings) {
      warnings->push_back("string " + hex(obj.id) +
                          " has an unresolved backing array " + hex(value->ref));
    }
    return std::nullopt;
  }
  const ConcreteObject* arr = graph.object(value->ref);
  if (!arr || arr->kind != ObjectKind::kPrimitiveArray) return std::nullopt;

  const auto& data = arr->primitive_data;
  if (arr->element_type == BasicType::kChar) {
    std::size_t begin = 0;
    std::size_t count = arr->length;
    // Pre-JDK 7u6 strings share arrays through offset/count.
    auto offset = int_field(obj, "offset");
    auto cnt = int_field(obj, "count");
    if (offset && cnt && *offset >= 0 && *cnt >= 0 &&
        static_cast<std::size_t>(*offset + *cnt) <= arr->length) {
      begin = static_cast<std::size_t>(*offset);
      count = static_cast<std::size_t>(*cnt);
    }
    std::vector<std::uint16_t> units;
    units.reserve(count);
    for (std::size_t i = begin; i < begin + count; ++i) {
      units.push_back(static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]));
    }
    return utf16_to_utf8(units);
  }
  if (arr->element_type == BasicType::kByte) {
    std::uint64_t coder = 0;
    if (const Value* c = obj.field("coder"); c && c->kind == Value::Kind::kPrimitive) {
      coder = c->bits;
    }
    std::vector<std::uint16_t> units;
    if (coder == 0) {
      units.assign(data.begin(), data.end());
    } else {
      // Compact strings keep UTF-16 in the VM's native order; dumps come from
      // little-endian hosts.
      for (std::size_t i = 0; i + 1 < data.size(); i += 2) {
        units.push_back(static_cast<std::uint16_t>(data[i] | (data[i + 1] << 8)));
      }
    }
    return utf16_to_utf8(units);
  }
  return std::nullopt;
}

std::vector<const ConcreteObject*> objects_of_class(const HeapGraph& graph,
                                                    std::string_view fq_name,
                                                    bool include_subclasses) {
  std::vector<const ConcreteObject*> out;
  for (const auto& [id, o] : graph.objects) {
    if (o.kind == ObjectKind::kClassObject && fq_name != "java.lang.Class") {
      continue;
    }
    if (o.type_name == fq_name) {
      out.push_back(&o);
    } else if (include_subclasses && o.kind == ObjectKind::kInstance) {
      for (const auto* c : graph.class_chain(o.class_ref)) {
        if (c->fq_name == fq_name) {
          out.push_back(&o);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace heapfacts
