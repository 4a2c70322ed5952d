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

#ifndef HEAPFACTS_HEAP_MODEL_H_
#define HEAPFACTS_HEAP_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heapfacts/hprof_reader.h"
#include "heapfacts/jvm_names.h"

namespace heapfacts {

inline constexpr std::string_view kUnknownClassName = "<unknown class>";

// A field or array slot. Exactly one of four states; an object reference
// that does not resolve is kDangling, never kObject.
struct Value {
  enum class Kind { kNull, kObject, kPrimitive, kDangling };

  Kind kind = Kind::kNull;
  ObjectId ref = 0;              // kObject / kDangling
  BasicType type = BasicType::kObject;
  std::uint64_t bits = 0;        // kPrimitive, zero-extended

  static Value null() { return {}; }
  static Value object(ObjectId id) { return {Kind::kObject, id}; }
  static Value dangling(ObjectId id) { return {Kind::kDangling, id}; }
  static Value primitive(BasicType t, std::uint64_t bits) {
    return {Kind::kPrimitive, 0, t, bits};
  }

  bool is_object() const { return kind == Kind::kObject; }
  bool operator==(const Value&) const = default;
};

struct FieldValue {
  std::string name;
  Value value;
  bool operator==(const FieldValue&) const = default;
};

struct FrameView {
  std::string class_name;
  std::string method_name;
  std::string method_descriptor;
  std::optional<std::string> source_file;
  std::optional<std::uint32_t> line;

  // Canonical method signature id, or a raw "<C: name desc>" spelling when
  // the descriptor does not parse.
  std::string signature() const;
  bool operator==(const FrameView&) const = default;
};

// Innermost (allocating) frame first.
struct StackTraceView {
  std::uint32_t serial = 0;
  std::uint32_t thread_serial = 0;
  std::vector<FrameView> frames;
  bool operator==(const StackTraceView&) const = default;
};

enum class ObjectKind { kInstance, kObjectArray, kPrimitiveArray, kClassObject };

struct ConcreteObject {
  ObjectId id = 0;
  ObjectId class_ref = 0;
  ObjectKind kind = ObjectKind::kInstance;
  // Dotted runtime type: "a.b.C", "a.b.C[]", "int[]", or for class objects
  // "java.lang.Class".
  std::string type_name;
  bool unknown_class = false;

  // Instances: own fields first, then superclass fields (dump order).
  std::vector<FieldValue> fields;
  // Object arrays.
  std::vector<Value> elements;
  // Primitive arrays: raw big-endian payload.
  BasicType element_type = BasicType::kByte;
  std::uint32_t length = 0;
  std::vector<std::uint8_t> primitive_data;

  std::optional<StackTraceView> alloc_trace;

  const Value* field(std::string_view name) const;
};

struct ClassInfo {
  ObjectId class_obj_id = 0;
  std::uint32_t serial = 0;
  std::string fq_name;
  ObjectId loader_id = 0;
  std::optional<ObjectId> super_ref;
  std::vector<FieldValue> static_fields;
  std::vector<std::pair<std::string, BasicType>> instance_field_layout;
};

struct HeapGraph {
  std::uint32_t id_size = 8;
  std::map<ObjectId, ConcreteObject> objects;
  std::map<ObjectId, ClassInfo> classes;
  std::map<std::string, std::vector<ObjectId>> strings_by_content;
  std::vector<ObjectId> gc_roots;
  // Every stack trace in the dump (allocation and thread traces), by serial.
  std::map<std::uint32_t, StackTraceView> traces;
  std::vector<std::string> warnings;

  const ConcreteObject* object(ObjectId id) const;
  const ClassInfo* class_info(ObjectId id) const;
  // Exact fq_name lookup; several entries when loaders differ.
  std::vector<const ClassInfo*> classes_named(std::string_view fq_name) const;
  // The class itself followed by its superclasses, nearest first.
  std::vector<const ClassInfo*> class_chain(ObjectId class_id) const;
  // Dotted names of the supertypes of an object's class (excluding itself).
  std::vector<std::string> supertypes_of(const ConcreteObject& obj) const;
};

// Resolves records into objects. Never throws: unresolvable data becomes a
// warning plus an unknown-class marker or dangling value.
HeapGraph build_heap(const hprof::RawDump& dump);

// Content of a java.lang.String instance, for both the char[] layout and the
// byte[] + coder layout. Absent for other objects or unresolved backing
// arrays; the latter also appends to `warnings` when given.
std::optional<std::string> decode_string(
    const ConcreteObject& obj, const HeapGraph& graph,
    std::vector<std::string>* warnings = nullptr);

// Objects whose runtime type is `fq_name` (or a subclass of it when
// `include_subclasses`), ordered by id.
std::vector<const ConcreteObject*> objects_of_class(const HeapGraph& graph,
                                                    std::string_view fq_name,
                                                    bool include_subclasses);

// UTF-16 code units to UTF-8; unpaired surrogates become U+FFFD.
std::string utf16_to_utf8(const std::vector<std::uint16_t>& units);

}  // namespace heapfacts

#endif  // HEAPFACTS_HEAP_MODEL_H_
