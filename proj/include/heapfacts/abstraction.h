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
// Maps concrete heap objects to the abstract objects a static analysis
// uses. Key spellings:
//
//   allocation site   <a.b.M: void m()>/new a.b.C/0
//   class object      <class a.b.C>   (or <class a.b.C loader 0x..>)
//   string content    <string "text">
//   merged strings    <merged-string java.lang.String>
//   no site found     <dynamic a.b.C (unknown site)>

#ifndef HEAPFACTS_ABSTRACTION_H_
#define HEAPFACTS_ABSTRACTION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heapfacts/code_model.h"
#include "heapfacts/heap_model.h"

namespace heapfacts {

enum class AbstractionKind {
  kAllocSite,
  kClassIdentity,
  kStringIdentity,
  kMergedString,
  kDummy,
};

std::string_view abstraction_kind_name(AbstractionKind kind);

struct ObjAbstraction {
  AbstractionKind kind = AbstractionKind::kDummy;
  std::string key;
  std::string type_name;
  // Class whose code allocated the object: the matched frame's class, else
  // the first frame that survives the skip rules. Feeds type sensitivity.
  std::optional<std::string> allocator_class;
  // Index into the allocation trace of that frame.
  std::optional<std::size_t> alloc_frame;

  bool operator==(const ObjAbstraction&) const = default;
};

struct AbstractionConfig {
  bool distinguish_strings_by_content = false;
  bool distinguish_loaders = false;
  std::vector<std::string> excluded_frame_prefixes = {
      "java.lang.reflect", "jdk.internal.reflect", "sun.reflect"};
  std::set<std::string> commonplace_types = {
      "boolean[]", "byte[]",   "char[]",   "short[]",
      "int[]",     "long[]",   "float[]",  "double[]",
      "java.lang.String", "java.lang.StringBuilder", "java.lang.StringBuffer"};

  // True when `class_name` equals a configured prefix or lies in a package
  // under it.
  bool excluded(std::string_view class_name) const;
  bool commonplace(std::string_view type_name) const;
};

struct FrameMatch {
  std::size_t frame_index = 0;
  FrameView frame;
  AllocationInstr site;
};

// Walks the trace innermost-out, skipping constructors of `obj_type` and its
// supertypes and frames in excluded packages. The first surviving frame
// found in `code` is tried for an allocation of `obj_type` on the frame's
// line, then anywhere in the method; the earliest bytecode index wins.
// Supertypes come from `supertypes` plus the code model's superclass map.
std::optional<FrameMatch> match_allocation_frame(
    const StackTraceView& trace, std::string_view obj_type,
    const CodeModel& code, const AbstractionConfig& cfg,
    std::span<const std::string> supertypes = {});

// Index of the first frame the skip rules keep, if any.
std::optional<std::size_t> first_surviving_frame(
    const StackTraceView& trace, std::string_view obj_type,
    const CodeModel& code, const AbstractionConfig& cfg,
    std::span<const std::string> supertypes = {});

std::string alloc_site_key(std::string_view signature_id,
                           std::string_view type_name,
                           std::uint32_t site_index);
std::string class_key(std::string_view fq_name);
std::string string_key(std::string_view content);
std::string merged_string_key(std::string_view type_name);
std::string dummy_key(std::string_view type_name);

ObjAbstraction abstract_object(const ConcreteObject& obj, const HeapGraph& graph,
                               const CodeModel& code,
                               const AbstractionConfig& cfg);

using AbstractionTable = std::map<ObjectId, ObjAbstraction>;

AbstractionTable abstraction_table(const HeapGraph& graph, const CodeModel& code,
                                   const AbstractionConfig& cfg);

}  // namespace heapfacts

#endif  // HEAPFACTS_ABSTRACTION_H_
