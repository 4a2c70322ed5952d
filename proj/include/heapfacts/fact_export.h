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
// Fact relations and recovered class archives.
//
//   relation            insensitive columns      sensitive columns
//   ObjectFieldValue    obj,field,value          ctx,obj,field,hctx,value
//   StaticFieldValue    class,field,value        class,field,hctx,value
//   ArrayContentsValue  obj,value                hctx_obj,obj,hctx_val,value
//   CallGraphEdge       invocation,method        callerCtx,invocation,calleeCtx,method
//   Reachable           method                   ctx,method
//
// Object cells hold abstraction keys; context cells hold "[c1, c2]".
// Enrichment instances and their constructor frames are not program state
// and never appear in the relations.

#ifndef HEAPFACTS_FACT_EXPORT_H_
#define HEAPFACTS_FACT_EXPORT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heapfacts/abstraction.h"
#include "heapfacts/code_model.h"
#include "heapfacts/context.h"
#include "heapfacts/csv.h"
#include "heapfacts/heap_model.h"

namespace heapfacts {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct Relation {
  std::string name;
  CsvRow header;
  std::vector<CsvRow> rows;  // sorted, unique

  std::string file_name() const { return name + ".csv"; }
  std::string to_csv() const;
};

struct FactSet {
  Relation object_field_value;
  Relation static_field_value;
  Relation array_contents_value;
  Relation call_graph_edge;
  Relation reachable;

  std::vector<const Relation*> relations() const;
};

// Header-only relations for the given mode.
FactSet empty_facts(bool sensitive);

// Row sets of a sensitive export with the context columns removed.
FactSet drop_contexts(const FactSet& sensitive);

struct FactOptions {
  AbstractionConfig abstraction;
  SensitivityConfig sensitivity;
  EnricherNames enrichers;
};

struct FactResult {
  FactSet facts;
  AbstractionTable table;
  EnricherBindings bindings;
  std::vector<std::string> warnings;  // heap, code and enrichment warnings
};

// Runs abstraction, enrichment recognition and context computation, then
// builds every relation. Throws EnricherShapeMismatch / CycleDetected on
// malformed enrichment.
FactResult build_facts(const HeapGraph& graph, const CodeModel& code,
                       const FactOptions& options);

// Relation construction from precomputed pieces.
FactSet build_fact_set(const HeapGraph& graph, const AbstractionTable& table,
                       const EnricherBindings& bindings,
                       const ContextBuilder& contexts,
                       const EnricherNames& names,
                       std::vector<std::string>* warnings);

struct ManifestInfo {
  std::vector<std::pair<std::string, std::string>> config;
  std::string dump_sha256;
  std::size_t warning_count = 0;
  std::string generated_at;  // ISO 8601 UTC; the only run-dependent field
};

// Writes the five CSV files and manifest.json into `out_dir` (created if
// needed) and returns the written paths. Throws IoError.
std::vector<std::filesystem::path> export_facts(const FactSet& facts,
                                                const std::filesystem::path& out_dir,
                                                const ManifestInfo& info);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string utc_timestamp_now();

struct ClassData {
  std::string fq_name;
  std::string loader_key;  // "bootstrap" for the null loader
  ObjectId loader_id = 0;
  std::vector<std::uint8_t> bytecode;

  // loader_<sanitized key>/<a/b/C>.class
  std::string archive_path() const;
};

// All ClassData instances, ordered by archive path. Same name and same
// loader object recorded twice keeps the first with a warning. Distinct
// loader objects sharing one abstraction get "#1", "#2", ... suffixes in id
// order. Throws EnricherShapeMismatch on malformed instances.
std::vector<ClassData> extract_class_data(const HeapGraph& graph,
                                          const AbstractionTable& table,
                                          const EnricherNames& names,
                                          std::vector<std::string>* warnings);

std::vector<std::uint8_t> class_archive_bytes(const std::vector<ClassData>& classes);

// Extracts and writes the archive to `archive`.
std::vector<ClassData> extract_class_archive(const HeapGraph& graph,
                                             const AbstractionTable& table,
                                             const EnricherNames& names,
                                             const std::filesystem::path& archive,
                                             std::vector<std::string>* warnings);

// Adds recovered classes to `code`. Classes already present keep their
// static definition (one warning each); unparsable bytecode is a warning.
CodeModel merged_code_inputs(CodeModel code, const std::vector<ClassData>& classes);

}  // namespace heapfacts

#endif  // HEAPFACTS_FACT_EXPORT_H_
