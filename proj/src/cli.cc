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

#include "heapfacts/cli.h"

#include <CLI11.hpp>

#include <future>
#include <iomanip>
#include <iostream>
#include <optional>

#include "file_io.h"
#include "heapfacts/abstraction.h"
#include "heapfacts/code_model.h"
#include "heapfacts/dump_synth.h"
#include "heapfacts/errors.h"
#include "heapfacts/fact_export.h"
#include "heapfacts/heap_model.h"
#include "heapfacts/hprof_reader.h"
#include "heapfacts/recall_eval.h"

namespace heapfacts::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct FactsArgs {
  std::string dump;
  std::vector<std::string> code;
  std::string site_map;
  std::string sensitivity = "insensitive";
  bool strings_by_content = false;
  bool distinguish_loaders = false;
  std::string out = "facts";
};

struct ClassesArgs {
  std::string dump;
  std::string out;
};

struct RecallArgs {
  std::string reference;
  std::string observed;
  bool method_pair = false;
  bool exact = false;
};

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::size_t objects = RandomParams{}.objects;
  std::uint32_t id_size = 8;
};

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

struct LoadedDump {
  std::string sha256;
  HeapGraph graph;
};

LoadedDump load_dump(const std::string& path) {
  auto bytes = internal::read_file(path);
  LoadedDump d;
  d.sha256 = sha256_hex(bytes);
  d.graph = build_heap(hprof::parse_dump(bytes));
  return d;
}

int run_facts(const FactsArgs& a, std::ostream& out, std::ostream& err) {
  auto sensitivity = SensitivityConfig::parse(a.sensitivity);
  if (!sensitivity) {
    throw UsageError("--sensitivity: expected 'insensitive' or flavor:n:m, got '" +
                     a.sensitivity + "'");
  }
  std::vector<fs::path> code_paths(a.code.begin(), a.code.end());
  // Code inputs and the dump are independent until abstraction.
  auto code_future = std::async(std::launch::async, [&] {
    CodeModel code = code_paths.empty() ? CodeModel{} : scan_inputs(code_paths);
    if (!a.site_map.empty()) {
      CodeModel sites = load_site_map_file(a.site_map);
      code = code_paths.empty() ? std::move(sites) : merge_code_models(std::move(code), sites);
    }
    return code;
  });
  LoadedDump dump = load_dump(a.dump);
  CodeModel code = code_future.get();

  FactOptions options;
  options.abstraction.distinguish_strings_by_content = a.strings_by_content;
  options.abstraction.distinguish_loaders = a.distinguish_loaders;
  options.sensitivity = *sensitivity;

  std::vector<std::string> class_warnings;
  auto prelim = abstraction_table(dump.graph, code, options.abstraction);
  auto recovered = extract_class_data(dump.graph, prelim, options.enrichers, &class_warnings);
  if (!recovered.empty()) code = merged_code_inputs(std::move(code), recovered);

  FactResult result = build_facts(dump.graph, code, options);
  result.warnings.insert(result.warnings.end(), class_warnings.begin(), class_warnings.end());
  print_warnings(result.warnings, err);

  ManifestInfo info;
  info.config = {
      {"sensitivity", sensitivity->to_string()},
      {"strings_by_content", a.strings_by_content ? "true" : "false"},
      {"distinguish_loaders", a.distinguish_loaders ? "true" : "false"},
      {"code", [&] {
         std::string joined;
         for (const auto& c : a.code) joined += (joined.empty() ? "" : ";") + c;
         return joined;
       }()},
      {"site_map", a.site_map},
      {"recovered_classes", std::to_string(recovered.size())},
  };
  info.dump_sha256 = dump.sha256;
  info.warning_count = result.warnings.size();
  info.generated_at = utc_timestamp_now();
  export_facts(result.facts, a.out, info);
  for (const Relation* r : result.facts.relations()) {
    out << r->name << " " << r->rows.size() << "\n";
  }
  return kExitOk;
}

int run_classes(const ClassesArgs& a, std::ostream& out, std::ostream& err) {
  LoadedDump dump = load_dump(a.dump);
  std::vector<std::string> warnings = dump.graph.warnings;
  AbstractionConfig cfg;
  auto table = abstraction_table(dump.graph, CodeModel{}, cfg);
  auto classes = extract_class_archive(dump.graph, table, EnricherNames{}, a.out, &warnings);
  print_warnings(warnings, err);
  for (const auto& c : classes) out << c.archive_path() << "\n";
  out << "classes " << classes.size() << "\n";
  return kExitOk;
}

int run_stats(const std::string& path, std::ostream& out, std::ostream& err) {
  auto bytes = internal::read_file(path);
  hprof::RawDump raw = hprof::parse_dump(bytes);
  auto stats = hprof::record_stats(raw);
  HeapGraph graph = build_heap(raw);
  print_warnings(graph.warnings, err);
  out << "id_size " << raw.header.id_size << "\n";
  for (const auto& [kind, n] : stats) {
    out << "records." << hprof::record_kind_name(kind) << " " << n << "\n";
  }
  std::size_t instances = 0;
  for (const auto& [id, o] : graph.objects) {
    if (o.kind != ObjectKind::kClassObject) ++instances;
  }
  out << "objects " << instances << "\n";
  out << "classes " << graph.classes.size() << "\n";
  out << "traces " << graph.traces.size() << "\n";
  out << "gc_roots " << graph.gc_roots.size() << "\n";
  out << "warnings " << graph.warnings.size() << "\n";
  return kExitOk;
}

int run_recall(const RecallArgs& a, std::ostream& out) {
  if (a.exact && a.method_pair) throw UsageError("--exact: conflicts with --method-pair");
  MatchMode mode = a.exact ? MatchMode::kExact : MatchMode::kMethodPair;
  auto r = recall(read_call_graph_edges(a.reference), read_call_graph_edges(a.observed), mode);
  out << "recall " << r.ratio() << " " << std::fixed << std::setprecision(6) << r.fraction()
      << "\n";
  for (const auto& e : r.missing) out << "missing " << e.invocation << " -> " << e.callee << "\n";
  return kExitOk;
}

int run_synth(const SynthArgs& a, std::ostream& out) {
  RandomParams params;
  params.objects = a.objects;
  SynthProgram p = random_program(a.seed, params);
  EmitOptions opts;
  opts.id_size = a.id_size;
  auto bytes = emit(p, opts);
  internal::write_file(a.out, bytes);
  std::string sites = site_map_text(p);
  internal::write_file(a.out + ".sites.tsv", std::string_view(sites));
  out << "objects " << p.objects().size() << "\n";
  out << "bytes " << bytes.size() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heap snapshot fact extractor", "heapfacts"};
  app.set_config("--config", "", "TOML file with flag values, one table per subcommand");
  app.require_subcommand(1);
  app.fallthrough();

  FactsArgs facts;
  auto* facts_cmd = app.add_subcommand("facts", "Export fact relations from a dump");
  facts_cmd->add_option("dump", facts.dump, "HPROF file")->required()->check(CLI::ExistingFile);
  facts_cmd->add_option("--code", facts.code, "Class files, directories or archives")
      ->check(CLI::ExistingPath);
  facts_cmd->add_option("--site-map", facts.site_map, "Allocation site map (TSV)")
      ->check(CLI::ExistingFile);
  facts_cmd->add_option("--sensitivity", facts.sensitivity,
                        "'insensitive' or flavor:n:m with flavor object|type|call-site");
  facts_cmd->add_flag("--strings-by-content", facts.strings_by_content,
                      "One abstract object per string constant");
  facts_cmd->add_flag("--distinguish-loaders", facts.distinguish_loaders,
                      "Qualify class objects by their loader");
  facts_cmd->add_option("--out", facts.out, "Output directory");

  ClassesArgs classes;
  auto* classes_cmd = app.add_subcommand("classes", "Recover dynamically loaded classes");
  classes_cmd->add_option("dump", classes.dump, "HPROF file")
      ->required()
      ->check(CLI::ExistingFile);
  classes_cmd->add_option("--out", classes.out, "Archive to write")->required();

  std::string stats_dump;
  auto* stats_cmd = app.add_subcommand("stats", "Record and object counts");
  stats_cmd->add_option("dump", stats_dump, "HPROF file")->required()->check(CLI::ExistingFile);

  RecallArgs rec;
  auto* recall_cmd = app.add_subcommand("recall", "Fraction of observed edges in a reference");
  recall_cmd->add_option("--reference", rec.reference, "Reference CallGraphEdge.csv")
      ->required()
      ->check(CLI::ExistingFile);
  recall_cmd->add_option("--observed", rec.observed, "Observed CallGraphEdge.csv")
      ->required()
      ->check(CLI::ExistingFile);
  recall_cmd->add_flag("--method-pair", rec.method_pair, "Compare caller/callee pairs (default)");
  recall_cmd->add_flag("--exact", rec.exact, "Compare invocation sites exactly");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a randomized fixture dump");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--out", synth.out, "Dump path; the site map goes to <out>.sites.tsv")
      ->required();
  synth_cmd->add_option("--objects", synth.objects, "Program object count");
  synth_cmd->add_option("--id-size", synth.id_size, "Identifier size")
      ->check(CLI::IsMember({4, 8}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*facts_cmd) return run_facts(facts, out, err);
    if (*classes_cmd) return run_classes(classes, out, err);
    if (*stats_cmd) return run_stats(stats_dump, out, err);
    if (*recall_cmd) return run_recall(rec, out);
    if (*synth_cmd) return run_synth(synth, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace heapfacts::cli
