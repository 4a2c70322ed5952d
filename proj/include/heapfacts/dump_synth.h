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
// Builds HPROF byte streams from a declarative description of a heap, so
// tests can exercise the whole pipeline without a JVM.
//
//   SynthProgram p;
//   p.add_class("a.C", "java.lang.Object", {{"f", BasicType::kObject}});
//   auto t = p.add_trace({frame("a.M", "make", "()V", 17)});
//   ObjectId o1 = p.new_instance("a.C", t);
//   ObjectId o2 = p.new_instance("a.C");
//   p.set_field(o1, "f", Value::object(o2));
//   std::vector<std::uint8_t> bytes = emit(p, 8);

#ifndef HEAPFACTS_DUMP_SYNTH_H_
#define HEAPFACTS_DUMP_SYNTH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heapfacts/heap_model.h"
#include "heapfacts/jvm_names.h"

namespace heapfacts {

enum class StringLayout { kCharArray, kByteArray };

struct SynthField {
  std::string name;
  BasicType type = BasicType::kObject;
  bool operator==(const SynthField&) const = default;
};

struct SynthClass {
  ObjectId id = 0;
  std::string name;                 // dotted
  std::optional<std::string> super; // dotted; absent only for java.lang.Object
  std::vector<SynthField> fields;
  std::vector<std::pair<SynthField, Value>> statics;
  ObjectId loader = 0;
};

struct SynthObject {
  ObjectId id = 0;
  ObjectKind kind = ObjectKind::kInstance;
  // Instance class, "a.b.C[]" for object arrays, "int[]" for primitive ones.
  std::string type_name;
  std::map<std::string, Value> fields;  // unset fields emit as zero / null
  std::vector<Value> elements;
  BasicType element_type = BasicType::kByte;
  std::vector<std::uint8_t> data;  // big-endian payload
  std::uint32_t trace = 0;         // serial, 0 = none
  std::optional<std::string> string_content;  // java.lang.String instances
};

// Where the builder says an object was allocated; used as the expected
// answer by abstraction tests.
struct SiteIntent {
  std::string signature_id;
  std::string type_name;
  std::optional<std::uint32_t> line;
  std::uint32_t site_index = 0;
  bool operator==(const SiteIntent&) const = default;
};

inline FrameView frame(std::string cls, std::string method, std::string desc,
                       std::optional<std::uint32_t> line = std::nullopt) {
  return {std::move(cls), std::move(method), std::move(desc), std::nullopt, line};
}

class SynthProgram {
 public:
  static constexpr std::string_view kObjAndCtx = "heapdl.ObjAndCtx";
  static constexpr std::string_view kEdgeCtx = "heapdl.EdgeCtx";
  static constexpr std::string_view kClassData = "heapdl.ClassData";

  explicit SynthProgram(StringLayout layout = StringLayout::kCharArray)
      : string_layout_(layout) {}

  // Declares a class. java.lang.Object is implicit. Re-declaring a name
  // returns the existing id.
  ObjectId add_class(std::string name, std::string super = "java.lang.Object",
                     std::vector<SynthField> fields = {}, ObjectId loader = 0);
  void add_static(std::string_view class_name, SynthField field, Value value);

  // Returns the trace serial (>= 1).
  std::uint32_t add_trace(std::vector<FrameView> frames);

  ObjectId new_instance(std::string_view class_name, std::uint32_t trace = 0);
  void set_field(ObjectId obj, std::string_view field, Value value);
  ObjectId new_object_array(std::string_view element_class, std::vector<Value> elements,
                            std::uint32_t trace = 0);
  ObjectId new_primitive_array(BasicType type, std::vector<std::uint8_t> data,
                               std::uint32_t trace = 0);
  ObjectId new_string(std::string_view utf8, std::uint32_t trace = 0);

  // Enrichment objects in the agent's shapes.
  ObjectId new_obj_and_ctx(ObjectId obj, std::optional<ObjectId> ctx,
                           std::uint32_t trace = 0);
  ObjectId new_edge_ctx(std::optional<ObjectId> caller_ctx,
                        std::optional<ObjectId> callee_ctx, std::uint32_t trace);
  ObjectId new_class_data(std::string_view name, std::optional<ObjectId> loader,
                          std::vector<std::uint8_t> bytecode);

  void add_root(ObjectId obj);
  // Expected abstraction of `obj`.
  void set_site(ObjectId obj, SiteIntent site) { sites_[obj] = std::move(site); }
  // Allocation sites in code order, listed by site_map_text.
  void declare_site(SiteIntent site) { declared_sites_.push_back(std::move(site)); }

  const std::vector<SynthClass>& classes() const { return classes_; }
  const std::vector<SynthObject>& objects() const { return objects_; }
  const std::vector<std::vector<FrameView>>& traces() const { return traces_; }
  const std::vector<ObjectId>& roots() const { return roots_; }
  const std::map<ObjectId, SiteIntent>& sites() const { return sites_; }
  const std::vector<SiteIntent>& declared_sites() const { return declared_sites_; }
  StringLayout string_layout() const { return string_layout_; }

  const SynthClass* find_class(std::string_view name) const;
  const SynthObject* find_object(ObjectId id) const;
  // Own fields first, then superclass fields.
  std::vector<SynthField> layout_of(std::string_view class_name) const;
  bool empty() const { return objects_.empty() && classes_.empty() && traces_.empty(); }

 private:
  ObjectId next_id();
  SynthObject& object_ref(ObjectId id);
  void ensure_string_class();
  void ensure_enricher_class(std::string_view name, std::vector<SynthField> fields);

  StringLayout string_layout_;
  ObjectId next_id_ = 0x1000;
  std::vector<SynthClass> classes_;
  std::vector<SynthObject> objects_;
  std::vector<std::vector<FrameView>> traces_;
  std::vector<ObjectId> roots_;
  std::map<ObjectId, SiteIntent> sites_;
  std::vector<SiteIntent> declared_sites_;
};

struct EmitOptions {
  std::uint32_t id_size = 8;
  // 0: one HEAP DUMP record. Otherwise HEAP DUMP SEGMENT records holding at
  // most this many sub-records each, followed by HEAP DUMP END.
  std::size_t segment_records = 0;
};

// Throws InconsistentProgram naming the first dangling id or unknown name.
std::vector<std::uint8_t> emit(const SynthProgram& program, const EmitOptions& options);
std::vector<std::uint8_t> emit(const SynthProgram& program, std::uint32_t id_size = 8);

struct RandomParams {
  std::size_t objects = 50;
  std::size_t classes = 6;
  std::size_t methods = 8;
  bool enrichers = true;
  bool class_data = true;
};

// Deterministic in (seed, params). Objects whose allocating frame pins down
// their site carry a SiteIntent.
SynthProgram random_program(std::uint64_t seed, const RandomParams& params = {});

// Site-map text (see code_model.h) for the declared sites.
std::string site_map_text(const SynthProgram& program);

}  // namespace heapfacts

#endif  // HEAPFACTS_DUMP_SYNTH_H_
