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
// Static side of allocation-site matching: methods, line tables and
// allocation instructions, read from class files or from a site-map text
// file.
//
// Site-map format (UTF-8, one site per line, tab separated, '#' comments):
//
//   <a.b.C: void m()>	java.lang.Object	5	0
//   signature_id       allocated_type      line|-  site_index

#ifndef HEAPFACTS_CODE_MODEL_H_
#define HEAPFACTS_CODE_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heapfacts {

struct AllocationInstr {
  std::uint32_t bytecode_index = 0;
  // "a.b.C", "int[]", "a.b.C[][]".
  std::string allocated_type;
  std::optional<std::uint32_t> line;
  // Ordinal among allocations of the same type in the method, bytecode order.
  std::uint32_t site_index = 0;

  bool operator==(const AllocationInstr&) const = default;
};

struct MethodMeta {
  std::string declaring_class;
  std::string name;
  std::string descriptor;
  std::string signature_id;
  bool is_static = false;
  // (start bytecode index, line), sorted by index.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> line_table;
  // Sorted by bytecode_index.
  std::vector<AllocationInstr> alloc_instructions;

  bool operator==(const MethodMeta&) const = default;
};

struct ClassFileInfo {
  std::string name;                      // dotted
  std::optional<std::string> super_name; // dotted; absent for java.lang.Object
  bool is_interface = false;
  std::vector<MethodMeta> methods;
};

// Throws MalformedClassFile on bad magic, a truncated constant pool or
// structure, or an instruction stream that does not end exactly at the
// code length.
ClassFileInfo parse_class(std::span<const std::uint8_t> bytes);
std::vector<MethodMeta> parse_classfile(std::span<const std::uint8_t> bytes);

// Start offsets of every instruction in a Code attribute body. Throws
// MalformedClassFile on an unknown opcode or when the last instruction does
// not end at code.size().
std::vector<std::uint32_t> instruction_offsets(std::span<const std::uint8_t> code);

enum class CodeSource { kEmpty, kClassfileScan, kSiteMap, kMerged };

struct CodeModel {
  std::map<std::string, MethodMeta> methods;  // by signature_id
  std::set<std::string> classes_seen;
  // Dotted superclass names, from class files only.
  std::map<std::string, std::string> superclasses;
  CodeSource source = CodeSource::kEmpty;
  std::vector<std::string> warnings;

  const MethodMeta* find(std::string_view signature_id) const;
  const MethodMeta* find(std::string_view declaring_class,
                         std::string_view name,
                         std::string_view descriptor) const;

  // Adds a parsed class. A class already present keeps its first definition
  // and yields one warning naming `origin`; returns false in that case.
  bool add_class(ClassFileInfo cls, std::string_view origin);
};

// Loads .class files from files, directories (recursively, sorted) and
// zip/jar archives. Unreadable or malformed entries become warnings.
CodeModel scan_inputs(const std::vector<std::filesystem::path>& paths);

// Throws SiteMapSyntax with the 1-based line number of the first bad line,
// including duplicate (signature, type, site_index) rows.
CodeModel load_site_map(std::string_view text);
CodeModel load_site_map_file(const std::filesystem::path& path);

// Union of two models; `primary` wins on signature collisions and each
// collision adds a warning.
CodeModel merge_code_models(CodeModel primary, const CodeModel& secondary);

}  // namespace heapfacts

#endif  // HEAPFACTS_CODE_MODEL_H_
