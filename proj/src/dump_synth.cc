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

#include "heapfacts/dump_synth.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "byte_io.h"
#include "heapfacts/errors.h"
#include "heapfacts/hprof_reader.h"

namespace heapfacts {
namespace {

using internal::ByteSink;

constexpr std::string_view kObject = "java.lang.Object";
constexpr std::string_view kString = "java.lang.String";
constexpr ObjectId kObjectClassId = 0x100;
constexpr ObjectId kFrameClassBase = 0x40000000;

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::vector<std::uint16_t> utf8_to_utf16(std::string_view s) {
  std::vector<std::uint16_t> out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0xFFFD;
    std::size_t n = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0 && i + 1 < s.size()) {
      cp = ((c & 0x1Fu) << 6) | (s[i + 1] & 0x3F);
      n = 2;
    } else if ((c & 0xF0) == 0xE0 && i + 2 < s.size()) {
      cp = ((c & 0x0Fu) << 12) | ((s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F);
      n = 3;
    } else if ((c & 0xF8) == 0xF0 && i + 3 < s.size()) {
      cp = ((c & 0x07u) << 18) | ((s[i + 1] & 0x3F) << 12) |
           ((s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
      n = 4;
    }
    i += n;
    if (cp >= 0x10000) {
      cp -= 0x10000;
      out.push_back(static_cast<std::uint16_t>(0xD800 + (cp >> 10)));
      out.push_back(static_cast<std::uint16_t>(0xDC00 + (cp & 0x3FF)));
    } else {
      out.push_back(static_cast<std::uint16_t>(cp));
    }
  }
  return out;
}

bool value_fits(const Value& v, BasicType type) {
  if (type == BasicType::kObject) return v.kind != Value::Kind::kPrimitive;
  return v.kind == Value::Kind::kPrimitive && v.type == type;
}

// Serializes a program; ids and record order are fixed by declaration order.
class Emitter {
 public:
  Emitter(const SynthProgram& p, const EmitOptions& o) : p_(p), o_(o) {}

  std::vector<std::uint8_t> run() {
    if (o_.id_size != 4 && o_.id_size != 8) {
      throw InconsistentProgram("id size must be 4 or 8");
    }
    check();
    ByteSink out;
    out.str(hprof::kFormatName);
    out.u1(0);
    out.u4(o_.id_size);
    out.u8(0);
    if (p_.empty()) {
      record(out, hprof::Tag::kHeapDumpEnd, {});
      return std::move(out.buffer());
    }
    collect_classes();
    collect_frames();

    // Strings are interned while the other records are built.
    ByteSink rest;
    for (std::size_t i = 0; i < load_order_.size(); ++i) {
      ByteSink b;
      b.u4(static_cast<std::uint32_t>(i + 1));
      b.id(load_order_[i].first, o_.id_size);
      b.u4(0);
      b.id(str_id(internal_name(load_order_[i].second)), o_.id_size);
      record(rest, hprof::Tag::kLoadClass, b.buffer());
    }
    for (const auto& [id, f] : frame_list_) {
      ByteSink b;
      b.id(id, o_.id_size);
      b.id(str_id(f.method_name), o_.id_size);
      b.id(str_id(f.method_descriptor), o_.id_size);
      b.id(f.source_file ? str_id(*f.source_file) : 0, o_.id_size);
      b.u4(serial_of_class(f.class_name));
      b.u4(f.line ? *f.line : 0);
      record(rest, hprof::Tag::kStackFrame, b.buffer());
    }
    for (std::size_t t = 0; t < p_.traces().size(); ++t) {
      ByteSink b;
      b.u4(static_cast<std::uint32_t>(t + 1));
      b.u4(1);
      b.u4(static_cast<std::uint32_t>(p_.traces()[t].size()));
      for (const auto& f : p_.traces()[t]) b.id(frame_ids_.at(frame_key(f)), o_.id_size);
      record(rest, hprof::Tag::kStackTrace, b.buffer());
    }

    auto subs = heap_sub_records();
    if (o_.segment_records == 0) {
      ByteSink b;
      for (const auto& s : subs) b.bytes(s);
      record(rest, hprof::Tag::kHeapDump, b.buffer());
    } else {
      for (std::size_t i = 0; i < subs.size(); i += o_.segment_records) {
        ByteSink b;
        for (std::size_t j = i; j < std::min(subs.size(), i + o_.segment_records); ++j) {
          b.bytes(subs[j]);
        }
        record(rest, hprof::Tag::kHeapDumpSegment, b.buffer());
      }
      record(rest, hprof::Tag::kHeapDumpEnd, {});
    }
    for (const auto& [id, text] : string_list_) {
      ByteSink b;
      b.id(id, o_.id_size);
      b.str(text);
      record(out, hprof::Tag::kUtf8, b.buffer());
    }
    out.bytes(rest.buffer());
    return std::move(out.buffer());
  }

 private:
  using FrameKey = std::tuple<std::string, std::string, std::string,
                              std::optional<std::string>, std::optional<std::uint32_t>>;

  static FrameKey frame_key(const FrameView& f) {
    return {f.class_name, f.method_name, f.method_descriptor, f.source_file, f.line};
  }

  void record(ByteSink& out, hprof::Tag tag, std::span<const std::uint8_t> body) {
    out.u1(static_cast<std::uint8_t>(tag));
    out.u4(0);
    out.u4(static_cast<std::uint32_t>(body.size()));
    out.bytes(body);
  }

  ObjectId str_id(const std::string& text) {
    auto [it, fresh] = strings_.try_emplace(text, strings_.size() + 1);
    if (fresh) string_list_.emplace_back(it->second, text);
    return it->second;
  }

  void check() {
    std::set<ObjectId> ids;
    for (const auto& o : p_.objects()) ids.insert(o.id);
    auto check_ref = [&](const Value& v, const std::string& where) {
      if (v.kind == Value::Kind::kObject && !ids.contains(v.ref) &&
          !class_ids().contains(v.ref)) {
        throw InconsistentProgram(where + " references undeclared object " + hex(v.ref));
      }
      if (v.kind == Value::Kind::kDangling) {
        throw InconsistentProgram(where + " holds a dangling value " + hex(v.ref));
      }
    };
    for (const auto& c : p_.classes()) {
      if (c.super && *c.super != kObject && !p_.find_class(*c.super)) {
        throw InconsistentProgram("class " + c.name + " extends undeclared " + *c.super);
      }
      for (const auto& [f, v] : c.statics) check_ref(v, c.name + "." + f.name);
    }
    for (const auto& o : p_.objects()) {
      std::string where = "object " + hex(o.id);
      if (o.trace > p_.traces().size()) {
        throw InconsistentProgram(where + " uses undeclared trace " + std::to_string(o.trace));
      }
      if (o.kind == ObjectKind::kInstance) {
        if (!p_.find_class(o.type_name)) {
          throw InconsistentProgram(where + " has undeclared class " + o.type_name);
        }
        for (const auto& [name, v] : o.fields) check_ref(v, where + "." + name);
      }
      for (const auto& v : o.elements) check_ref(v, where + "[]");
    }
    for (ObjectId r : p_.roots()) {
      if (!ids.contains(r) && !class_ids().contains(r)) {
        throw InconsistentProgram("root references undeclared object " + hex(r));
      }
    }
  }

  const std::set<ObjectId>& class_ids() {
    if (class_ids_.empty()) {
      for (const auto& c : p_.classes()) class_ids_.insert(c.id);
    }
    return class_ids_;
  }

  ObjectId class_id(std::string_view name) const {
    if (name == kObject) {
      if (const SynthClass* c = p_.find_class(kObject)) return c->id;
      return kObjectClassId;
    }
    const SynthClass* c = p_.find_class(name);
    return c ? c->id : 0;
  }

  void collect_classes() {
    if (!p_.find_class(kObject)) {
      load_order_.emplace_back(kObjectClassId, std::string(kObject));
    }
    for (const auto& c : p_.classes()) load_order_.emplace_back(c.id, c.name);
    for (std::size_t i = 0; i < load_order_.size(); ++i) {
      serials_.emplace(load_order_[i].second, static_cast<std::uint32_t>(i + 1));
    }
  }

  void collect_frames() {
    ObjectId next_frame = 1;
    ObjectId next_class = kFrameClassBase;
    for (const auto& trace : p_.traces()) {
      for (const auto& f : trace) {
        if (!serials_.contains(f.class_name)) {
          load_order_.emplace_back(next_class, f.class_name);
          next_class += 8;
          serials_.emplace(f.class_name, static_cast<std::uint32_t>(load_order_.size()));
        }
        auto [it, fresh] = frame_ids_.try_emplace(frame_key(f), next_frame);
        if (fresh) {
          frame_list_.emplace_back(next_frame, f);
          ++next_frame;
        }
      }
    }
  }

  std::uint32_t serial_of_class(const std::string& name) const {
    return serials_.at(name);
  }

  std::vector<std::vector<std::uint8_t>> heap_sub_records() {
    std::vector<std::vector<std::uint8_t>> subs;
    const std::uint32_t ids = o_.id_size;
    for (ObjectId r : p_.roots()) {
      ByteSink b;
      b.u1(static_cast<std::uint8_t>(hprof::SubTag::kRootUnknown));
      b.id(r, ids);
      subs.push_back(std::move(b.buffer()));
    }
    auto class_dump = [&](ObjectId id, ObjectId super, ObjectId loader,
                          const std::vector<SynthField>& fields,
                          const std::vector<std::pair<SynthField, Value>>& statics) {
      ByteSink b;
      b.u1(static_cast<std::uint8_t>(hprof::SubTag::kClassDump));
      b.id(id, ids);
      b.u4(0);
      b.id(super, ids);
      b.id(loader, ids);
      for (int i = 0; i < 4; ++i) b.id(0, ids);
      std::uint32_t size = 0;
      for (const auto& f : fields) size += static_cast<std::uint32_t>(basic_type_size(f.type, ids));
      b.u4(size);
      b.u2(0);
      b.u2(static_cast<std::uint16_t>(statics.size()));
      for (const auto& [f, v] : statics) {
        b.id(str_id(f.name), ids);
        b.u1(static_cast<std::uint8_t>(f.type));
        write_value(b, f.type, v);
      }
      b.u2(static_cast<std::uint16_t>(fields.size()));
      for (const auto& f : fields) {
        b.id(str_id(f.name), ids);
        b.u1(static_cast<std::uint8_t>(f.type));
      }
      subs.push_back(std::move(b.buffer()));
    };
    if (!p_.find_class(kObject)) class_dump(kObjectClassId, 0, 0, {}, {});
    for (const auto& c : p_.classes()) {
      ObjectId super = c.super ? class_id(*c.super) : 0;
      class_dump(c.id, super, c.loader, c.fields, c.statics);
    }
    for (const auto& o : p_.objects()) {
      ByteSink b;
      switch (o.kind) {
        case ObjectKind::kInstance: {
          b.u1(static_cast<std::uint8_t>(hprof::SubTag::kInstanceDump));
          b.id(o.id, ids);
          b.u4(o.trace);
          b.id(class_id(o.type_name), ids);
          ByteSink fields;
          for (const auto& f : p_.layout_of(o.type_name)) {
            auto it = o.fields.find(f.name);
            write_value(fields, f.type, it == o.fields.end() ? Value::null() : it->second);
          }
          b.u4(static_cast<std::uint32_t>(fields.size()));
          b.bytes(fields.buffer());
          break;
        }
        case ObjectKind::kObjectArray:
          b.u1(static_cast<std::uint8_t>(hprof::SubTag::kObjectArrayDump));
          b.id(o.id, ids);
          b.u4(o.trace);
          b.u4(static_cast<std::uint32_t>(o.elements.size()));
          b.id(class_id(o.type_name), ids);
          for (const auto& e : o.elements) b.id(e.kind == Value::Kind::kObject ? e.ref : 0, ids);
          break;
        case ObjectKind::kPrimitiveArray: {
          b.u1(static_cast<std::uint8_t>(hprof::SubTag::kPrimitiveArrayDump));
          b.id(o.id, ids);
          b.u4(o.trace);
          auto n = o.data.size() / basic_type_size(o.element_type, ids);
          b.u4(static_cast<std::uint32_t>(n));
          b.u1(static_cast<std::uint8_t>(o.element_type));
          b.bytes(o.data);
          break;
        }
        case ObjectKind::kClassObject:
          break;
      }
      subs.push_back(std::move(b.buffer()));
    }
    return subs;
  }

  void write_value(ByteSink& b, BasicType type, const Value& v) {
    std::size_t n = basic_type_size(type, o_.id_size);
    std::uint64_t bits = 0;
    if (v.kind == Value::Kind::kObject) bits = v.ref;
    if (v.kind == Value::Kind::kPrimitive) bits = v.bits;
    for (std::size_t i = n; i-- > 0;) b.u1(static_cast<std::uint8_t>(bits >> (8 * i)));
  }

  const SynthProgram& p_;
  const EmitOptions& o_;
  std::map<std::string, ObjectId> strings_;
  std::vector<std::pair<ObjectId, std::string>> string_list_;
  std::vector<std::pair<ObjectId, std::string>> load_order_;
  std::map<std::string, std::uint32_t> serials_;
  std::map<FrameKey, ObjectId> frame_ids_;
  std::vector<std::pair<ObjectId, FrameView>> frame_list_;
  std::set<ObjectId> class_ids_;
};

}  // namespace

ObjectId SynthProgram::next_id() {
  ObjectId id = next_id_;
  next_id_ += 8;
  return id;
}

ObjectId SynthProgram::add_class(std::string name, std::string super,
                                 std::vector<SynthField> fields, ObjectId loader) {
  if (const SynthClass* c = find_class(name)) return c->id;
  SynthClass c;
  c.id = next_id();
  if (name != kObject) c.super = std::move(super);
  c.name = std::move(name);
  c.fields = std::move(fields);
  c.loader = loader;
  classes_.push_back(std::move(c));
  return classes_.back().id;
}

void SynthProgram::add_static(std::string_view class_name, SynthField field,
                              Value value) {
  for (auto& c : classes_) {
    if (c.name == class_name) {
      if (!value_fits(value, field.type)) {
        throw InconsistentProgram("static " + field.name + " value does not match its type");
      }
      c.statics.emplace_back(std::move(field), value);
      return;
    }
  }
  throw InconsistentProgram("static field on undeclared class " + std::string(class_name));
}

std::uint32_t SynthProgram::add_trace(std::vector<FrameView> frames) {
  traces_.push_back(std::move(frames));
  return static_cast<std::uint32_t>(traces_.size());
}

ObjectId SynthProgram::new_instance(std::string_view class_name, std::uint32_t trace) {
  SynthObject o;
  o.id = next_id();
  o.kind = ObjectKind::kInstance;
  o.type_name = class_name;
  o.trace = trace;
  objects_.push_back(std::move(o));
  return objects_.back().id;
}

SynthObject& SynthProgram::object_ref(ObjectId id) {
  for (auto& o : objects_) {
    if (o.id == id) return o;
  }
  throw InconsistentProgram("undeclared object " + hex(id));
}

void SynthProgram::set_field(ObjectId obj, std::string_view field, Value value) {
  SynthObject& o = object_ref(obj);
  for (const auto& f : layout_of(o.type_name)) {
    if (f.name == field) {
      if (!value_fits(value, f.type)) {
        throw InconsistentProgram("field " + f.name + " value does not match its type");
      }
      o.fields[f.name] = value;
      return;
    }
  }
  throw InconsistentProgram(o.type_name + " has no field " + std::string(field));
}

ObjectId SynthProgram::new_object_array(std::string_view element_class,
                                        std::vector<Value> elements,
                                        std::uint32_t trace) {
  std::string type = std::string(element_class) + "[]";
  add_class(type);
  SynthObject o;
  o.id = next_id();
  o.kind = ObjectKind::kObjectArray;
  o.type_name = std::move(type);
  o.elements = std::move(elements);
  o.trace = trace;
  objects_.push_back(std::move(o));
  return objects_.back().id;
}

ObjectId SynthProgram::new_primitive_array(BasicType type, std::vector<std::uint8_t> data,
                                           std::uint32_t trace) {
  if (type == BasicType::kObject || data.size() % basic_type_size(type, 8) != 0) {
    throw InconsistentProgram("bad primitive array payload");
  }
  SynthObject o;
  o.id = next_id();
  o.kind = ObjectKind::kPrimitiveArray;
  o.type_name = std::string(basic_type_name(type)) + "[]";
  o.element_type = type;
  o.data = std::move(data);
  o.trace = trace;
  objects_.push_back(std::move(o));
  return objects_.back().id;
}

void SynthProgram::ensure_string_class() {
  if (find_class(kString)) return;
  if (string_layout_ == StringLayout::kCharArray) {
    add_class(std::string(kString), std::string(kObject),
              {{"value", BasicType::kObject}, {"hash", BasicType::kInt}});
  } else {
    add_class(std::string(kString), std::string(kObject),
              {{"value", BasicType::kObject},
               {"coder", BasicType::kByte},
               {"hash", BasicType::kInt}});
  }
}

ObjectId SynthProgram::new_string(std::string_view utf8, std::uint32_t trace) {
  ensure_string_class();
  auto units = utf8_to_utf16(utf8);
  std::vector<std::uint8_t> data;
  ObjectId backing = 0;
  std::uint8_t coder = 0;
  if (string_layout_ == StringLayout::kCharArray) {
    for (auto u : units) {
      data.push_back(static_cast<std::uint8_t>(u >> 8));
      data.push_back(static_cast<std::uint8_t>(u));
    }
    backing = new_primitive_array(BasicType::kChar, std::move(data));
  } else {
    bool latin1 = std::all_of(units.begin(), units.end(),
                              [](std::uint16_t u) { return u <= 0xFF; });
    coder = latin1 ? 0 : 1;
    for (auto u : units) {
      if (latin1) {
        data.push_back(static_cast<std::uint8_t>(u));
      } else {
        data.push_back(static_cast<std::uint8_t>(u));
        data.push_back(static_cast<std::uint8_t>(u >> 8));
      }
    }
    backing = new_primitive_array(BasicType::kByte, std::move(data));
  }
  ObjectId s = new_instance(kString, trace);
  set_field(s, "value", Value::object(backing));
  if (string_layout_ == StringLayout::kByteArray) {
    set_field(s, "coder", Value::primitive(BasicType::kByte, coder));
  }
  object_ref(s).string_content = std::string(utf8);
  return s;
}

void SynthProgram::ensure_enricher_class(std::string_view name,
                                         std::vector<SynthField> fields) {
  if (!find_class(name)) add_class(std::string(name), std::string(kObject), std::move(fields));
}

ObjectId SynthProgram::new_obj_and_ctx(ObjectId obj, std::optional<ObjectId> ctx,
                                       std::uint32_t trace) {
  ensure_enricher_class(kObjAndCtx, {{"obj", BasicType::kObject}, {"ctx", BasicType::kObject}});
  ObjectId e = new_instance(kObjAndCtx, trace);
  set_field(e, "obj", Value::object(obj));
  set_field(e, "ctx", ctx ? Value::object(*ctx) : Value::null());
  return e;
}

ObjectId SynthProgram::new_edge_ctx(std::optional<ObjectId> caller_ctx,
                                    std::optional<ObjectId> callee_ctx,
                                    std::uint32_t trace) {
  ensure_enricher_class(kEdgeCtx, {{"callerCtx", BasicType::kObject},
                                   {"calleeCtx", BasicType::kObject}});
  ObjectId e = new_instance(kEdgeCtx, trace);
  set_field(e, "callerCtx", caller_ctx ? Value::object(*caller_ctx) : Value::null());
  set_field(e, "calleeCtx", callee_ctx ? Value::object(*callee_ctx) : Value::null());
  return e;
}

ObjectId SynthProgram::new_class_data(std::string_view name,
                                      std::optional<ObjectId> loader,
                                      std::vector<std::uint8_t> bytecode) {
  ensure_enricher_class(kClassData, {{"name", BasicType::kObject},
                                     {"loader", BasicType::kObject},
                                     {"bytecode", BasicType::kObject}});
  ObjectId n = new_string(name);
  ObjectId b = new_primitive_array(BasicType::kByte, std::move(bytecode));
  ObjectId e = new_instance(kClassData);
  set_field(e, "name", Value::object(n));
  set_field(e, "loader", loader ? Value::object(*loader) : Value::null());
  set_field(e, "bytecode", Value::object(b));
  return e;
}

void SynthProgram::add_root(ObjectId obj) { roots_.push_back(obj); }

const SynthClass* SynthProgram::find_class(std::string_view name) const {
  for (const auto& c : classes_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const SynthObject* SynthProgram::find_object(ObjectId id) const {
  for (const auto& o : objects_) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

std::vector<SynthField> SynthProgram::layout_of(std::string_view class_name) const {
  std::vector<SynthField> out;
  std::set<std::string> seen;
  const SynthClass* c = find_class(class_name);
  while (c && seen.insert(c->name).second) {
    out.insert(out.end(), c->fields.begin(), c->fields.end());
    c = c->super ? find_class(*c->super) : nullptr;
  }
  return out;
}

std::vector<std::uint8_t> emit(const SynthProgram& program, const EmitOptions& options) {
  return Emitter(program, options).run();
}

std::vector<std::uint8_t> emit(const SynthProgram& program, std::uint32_t id_size) {
  EmitOptions o;
  o.id_size = id_size;
  return emit(program, o);
}

namespace {

// A class file with no members; enough for the code model to parse.
std::vector<std::uint8_t> minimal_class_bytes(std::string_view dotted) {
  ByteSink b;
  b.u4(0xCAFEBABE);
  b.u2(0);
  b.u2(49);
  b.u2(5);
  std::string name = internal_name(dotted);
  b.u1(1);
  b.u2(static_cast<std::uint16_t>(name.size()));
  b.str(name);
  b.u1(7);
  b.u2(1);
  b.u1(1);
  b.u2(16);
  b.str("java/lang/Object");
  b.u1(7);
  b.u2(3);
  b.u2(0x0021);
  b.u2(2);
  b.u2(4);
  for (int i = 0; i < 4; ++i) b.u2(0);
  return std::move(b.buffer());
}

class RandomBuilder {
 public:
  RandomBuilder(std::uint64_t seed, const RandomParams& params)
      : rng_(seed), params_(params), p_(seed % 4 == 3 ? StringLayout::kByteArray
                                                      : StringLayout::kCharArray) {}

  SynthProgram build() {
    if (params_.objects == 0) return std::move(p_);
    declare_classes();
    declare_methods();
    for (std::size_t i = 0; i < params_.objects; ++i) make_object();
    fill_fields();
    fill_statics();
    if (params_.enrichers) add_enrichers();
    if (params_.class_data && chance(50)) add_class_data();
    for (ObjectId id : program_objects_) {
      if (chance(10)) p_.add_root(id);
    }
    return std::move(p_);
  }

 private:
  struct Method {
    std::string cls, name, desc;
    std::uint32_t next_line = 10;
    std::map<std::string, std::uint32_t> per_type;
  };
  struct Site {
    std::size_t method;
    std::string type;
    std::uint32_t line;
    std::uint32_t index;
  };

  std::uint64_t pick(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(unsigned pct) { return pick(100) < pct; }

  void declare_classes() {
    static constexpr BasicType kTypes[] = {
        BasicType::kObject, BasicType::kObject, BasicType::kObject, BasicType::kInt,
        BasicType::kLong,   BasicType::kBoolean, BasicType::kChar,  BasicType::kByte,
        BasicType::kShort,  BasicType::kFloat,  BasicType::kDouble};
    std::size_t n = std::max<std::size_t>(1, params_.classes);
    for (std::size_t i = 0; i < n; ++i) {
      std::string name = "app.C" + std::to_string(i);
      std::string super = (i > 0 && chance(50))
                              ? "app.C" + std::to_string(pick(i))
                              : std::string(kObject);
      std::vector<SynthField> fields;
      std::size_t k = pick(4);
      for (std::size_t j = 0; j < k; ++j) {
        fields.push_back({"f" + std::to_string(i) + "_" + std::to_string(j),
                          kTypes[pick(std::size(kTypes))]});
      }
      p_.add_class(name, super, std::move(fields));
      app_classes_.push_back(name);
    }
  }

  void declare_methods() {
    static constexpr std::string_view kDescs[] = {
        "()V", "(I)Ljava/lang/Object;", "(Ljava/lang/String;[I)V", "()[Ljava/lang/Object;"};
    std::size_t n = std::max<std::size_t>(1, params_.methods);
    for (std::size_t j = 0; j < n; ++j) {
      Method m;
      m.cls = "app.M" + std::to_string(j % 3);
      m.name = "m" + std::to_string(j);
      m.desc = kDescs[pick(std::size(kDescs))];
      methods_.push_back(std::move(m));
    }
  }

  std::string method_sig(const Method& m) const {
    return *signature_id(m.cls, m.name, m.desc);
  }

  FrameView random_caller() {
    const Method& m = methods_[pick(methods_.size())];
    std::optional<std::uint32_t> line;
    if (!chance(10)) line = 1 + static_cast<std::uint32_t>(pick(300));
    return frame(m.cls, m.name, m.desc, line);
  }

  // Trace for a new object of `type`; also records the expected site.
  std::uint32_t allocation(const std::string& type, bool instance,
                           std::optional<SiteIntent>* intent) {
    if (chance(8)) return 0;
    std::vector<Site*> same_type;
    for (auto& s : sites_) {
      if (s.type == type) same_type.push_back(&s);
    }
    Site site;
    if (!same_type.empty() && chance(30)) {
      site = *same_type[pick(same_type.size())];
    } else {
      std::size_t mi = pick(methods_.size());
      Method& m = methods_[mi];
      m.next_line += 1 + static_cast<std::uint32_t>(pick(3));
      site = {mi, type, m.next_line, m.per_type[type]++};
      sites_.push_back(site);
      p_.declare_site({method_sig(m), type, site.line, site.index});
    }
    const Method& m = methods_[site.method];

    std::vector<FrameView> frames;
    if (instance && chance(50)) {
      std::vector<std::string> chain;
      for (const SynthClass* c = p_.find_class(type); c;
           c = c->super ? p_.find_class(*c->super) : nullptr) {
        chain.push_back(c->name);
      }
      chain.push_back(std::string(kObject));
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        if (it != chain.rbegin() && *it == kObject) continue;
        frames.push_back(frame(*it, "<init>", "()V", 1 + static_cast<std::uint32_t>(pick(50))));
      }
    }
    if (chance(10)) {
      frames.push_back(frame("jdk.internal.reflect.DirectConstructorHandleAccessor",
                             "newInstance", "([Ljava/lang/Object;)Ljava/lang/Object;", 62));
    }
    bool lineless = chance(10);
    frames.push_back(frame(m.cls, m.name, m.desc,
                           lineless ? std::nullopt : std::optional<std::uint32_t>(site.line)));
    std::size_t callers = pick(4);
    for (std::size_t i = 0; i < callers; ++i) frames.push_back(random_caller());
    if (!lineless || site.index == 0) {
      *intent = SiteIntent{method_sig(m), type, site.line, site.index};
    }
    return p_.add_trace(std::move(frames));
  }

  void make_object() {
    std::uint64_t roll = pick(100);
    std::optional<SiteIntent> intent;
    ObjectId id = 0;
    if (roll < 55) {
      const std::string& cls = app_classes_[pick(app_classes_.size())];
      std::uint32_t t = allocation(cls, true, &intent);
      id = p_.new_instance(cls, t);
      instances_.push_back(id);
    } else if (roll < 70) {
      std::string elem = chance(30) ? std::string(kObject)
                                    : app_classes_[pick(app_classes_.size())];
      std::uint32_t t = allocation(elem + "[]", false, &intent);
      std::vector<Value> elems;
      std::size_t n = pick(6);
      for (std::size_t i = 0; i < n; ++i) {
        if (program_objects_.empty() || chance(20)) {
          elems.push_back(Value::null());
        } else {
          elems.push_back(Value::object(program_objects_[pick(program_objects_.size())]));
        }
      }
      id = p_.new_object_array(elem, std::move(elems), t);
    } else if (roll < 82) {
      static constexpr BasicType kPrims[] = {
          BasicType::kBoolean, BasicType::kChar, BasicType::kFloat, BasicType::kDouble,
          BasicType::kByte,    BasicType::kShort, BasicType::kInt,  BasicType::kLong};
      BasicType type = kPrims[pick(std::size(kPrims))];
      std::string name = std::string(basic_type_name(type)) + "[]";
      std::uint32_t t = allocation(name, false, &intent);
      std::vector<std::uint8_t> data(pick(7) * basic_type_size(type, 8));
      for (auto& b : data) b = static_cast<std::uint8_t>(pick(256));
      id = p_.new_primitive_array(type, std::move(data), t);
    } else {
      static constexpr std::string_view kTexts[] = {
          "", "a", "config.xml", "h\xC3\xA9llo", "\xE6\x97\xA5\xE6\x9C\xAC",
          "x,y", "quote\"d", "line\nbreak", "config.xml"};
      std::uint32_t t = allocation(std::string(kString), false, &intent);
      id = p_.new_string(kTexts[pick(std::size(kTexts))], t);
    }
    program_objects_.push_back(id);
    if (intent) p_.set_site(id, *intent);
  }

  void fill_fields() {
    for (ObjectId id : instances_) {
      const SynthObject* o = p_.find_object(id);
      for (const auto& f : p_.layout_of(o->type_name)) {
        if (f.type == BasicType::kObject) {
          if (chance(25)) continue;
          p_.set_field(id, f.name,
                       Value::object(program_objects_[pick(program_objects_.size())]));
        } else {
          std::size_t n = basic_type_size(f.type, 8);
          std::uint64_t bits = rng_();
          if (n < 8) bits &= (std::uint64_t{1} << (8 * n)) - 1;
          p_.set_field(id, f.name, Value::primitive(f.type, bits));
        }
      }
    }
  }

  void fill_statics() {
    for (const auto& cls : app_classes_) {
      if (chance(40)) {
        p_.add_static(cls, {"S_" + cls.substr(4), BasicType::kObject},
                      Value::object(program_objects_[pick(program_objects_.size())]));
      }
      if (chance(30)) {
        p_.add_static(cls, {"COUNT", BasicType::kInt},
                      Value::primitive(BasicType::kInt, pick(1000)));
      }
    }
  }

  void add_enrichers() {
    // Receiver chains: a context always precedes its object, so chains end.
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      if (!chance(60)) continue;
      std::optional<ObjectId> ctx;
      if (i > 0 && !chance(10)) ctx = instances_[pick(i)];
      p_.new_obj_and_ctx(instances_[i], ctx);
    }
    std::size_t edges = 1 + pick(params_.objects / 5 + 1);
    for (std::size_t k = 0; k < edges; ++k) {
      std::vector<FrameView> frames{frame(std::string(SynthProgram::kEdgeCtx), "<init>",
                                          "(Ljava/lang/Object;Ljava/lang/Object;)V", 9)};
      std::size_t depth = chance(10) ? 1 : 2 + pick(3);
      for (std::size_t d = 0; d < depth; ++d) frames.push_back(random_caller());
      auto ctx = [&]() -> std::optional<ObjectId> {
        if (instances_.empty() || chance(20)) return std::nullopt;
        return instances_[pick(instances_.size())];
      };
      auto caller = ctx();
      auto callee = ctx();
      p_.new_edge_ctx(caller, callee, p_.add_trace(std::move(frames)));
    }
  }

  void add_class_data() {
    p_.add_class("app.Loader");
    ObjectId l1 = p_.new_instance("app.Loader");
    ObjectId l2 = p_.new_instance("app.Loader");
    std::size_t n = 1 + pick(3);
    for (std::size_t k = 0; k < n; ++k) {
      std::string name = "gen.Dyn" + std::to_string(k);
      p_.new_class_data(name, k % 2 ? l2 : l1, minimal_class_bytes(name));
    }
    if (chance(50)) p_.new_class_data("gen.Dyn0", l2, minimal_class_bytes("gen.Dyn0"));
  }

  std::mt19937_64 rng_;
  RandomParams params_;
  SynthProgram p_;
  std::vector<std::string> app_classes_;
  std::vector<Method> methods_;
  std::vector<Site> sites_;
  std::vector<ObjectId> program_objects_;
  std::vector<ObjectId> instances_;
};

}  // namespace

SynthProgram random_program(std::uint64_t seed, const RandomParams& params) {
  return RandomBuilder(seed, params).build();
}

std::string site_map_text(const SynthProgram& program) {
  std::string out;
  for (const auto& s : program.declared_sites()) {
    out += s.signature_id + "\t" + s.type_name + "\t" +
           (s.line ? std::to_string(*s.line) : std::string("-")) + "\t" +
           std::to_string(s.site_index) + "\n";
  }
  return out;
}

}  // namespace heapfacts
