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
// Spelling conversions between JVM internal names, descriptors and the
// source-style type names used as join keys everywhere downstream.
//
//   internal          dotted / source style
//   java/lang/String  java.lang.String
//   [I                int[]
//   [[Ljava/lang/X;   java.lang.X[][]
//
// Method identity is the canonical signature id
//   <a.b.C: ret name(arg1,arg2)>
// which frames, facts and site maps all share.

#ifndef HEAPFACTS_JVM_NAMES_H_
#define HEAPFACTS_JVM_NAMES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heapfacts {

using ObjectId = std::uint64_t;

// HPROF basic type codes (also used for field layouts and array elements).
enum class BasicType : std::uint8_t {
  kObject = 2,
  kBoolean = 4,
  kChar = 5,
  kFloat = 6,
  kDouble = 7,
  kByte = 8,
  kShort = 9,
  kInt = 10,
  kLong = 11,
};

std::optional<BasicType> basic_type_from_code(std::uint8_t code);

// Size in bytes of one value; objects take `id_size`.
std::size_t basic_type_size(BasicType type, std::uint32_t id_size);

// "int", "char", ... ; kObject yields "java.lang.Object".
std::string_view basic_type_name(BasicType type);

// Accepts internal names ("a/b/C"), already dotted names, and array
// descriptors ("[I", "[La/b/C;"), returning the source-style spelling.
std::string dotted_name(std::string_view name);

// Inverse of dotted_name for classes: "a.b.C" -> "a/b/C",
// "int[]" -> "[I".
std::string internal_name(std::string_view dotted);

// Converts one field descriptor starting at `desc[0]` and reports how many
// characters it used. Absent on malformed input.
std::optional<std::string> type_from_descriptor(std::string_view desc,
                                                std::size_t* consumed = nullptr);

// "int[]" -> "[I", "a.b.C" -> "La/b/C;". Absent for an empty name.
std::optional<std::string> descriptor_for_type(std::string_view type);

struct MethodDescriptor {
  std::vector<std::string> params;
  std::string ret;
};

std::optional<MethodDescriptor> parse_method_descriptor(std::string_view desc);

std::string signature_id(std::string_view declaring_class,
                         std::string_view method_name,
                         const MethodDescriptor& descriptor);

// Absent when `descriptor` does not parse.
std::optional<std::string> signature_id(std::string_view declaring_class,
                                        std::string_view method_name,
                                        std::string_view descriptor);

struct ParsedSignature {
  std::string declaring_class;
  std::string return_type;
  std::string name;
  std::vector<std::string> params;

  // Rebuilds the JVM descriptor from the source-style types.
  std::optional<std::string> descriptor() const;
};

std::optional<ParsedSignature> parse_signature_id(std::string_view sig);

}  // namespace heapfacts

#endif  // HEAPFACTS_JVM_NAMES_H_
