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

#include "heapfacts/fact_export.h"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "file_io.h"
#include "heapfacts/errors.h"
#include "heapfacts/zip_archive.h"

namespace heapfacts {
namespace {

namespace fs = std::filesystem;

Relation make_relation(std::string name, CsvRow insensitive, CsvRow sensitive,
                       bool is_sensitive) {
  return {std::move(name), is_sensitive ? std::move(sensitive) : std::move(insensitive),
          {}};
}

void assign_rows(Relation& r, std::set<CsvRow> rows) {
  r.rows.assign(std::make_move_iterator(rows.begin()),
                std::make_move_iterator(rows.end()));
}

std::string_view signature_class(std::string_view sig) {
  if (sig.size() < 2 || sig.front() != '<') return {};
  auto colon = sig.find(':');
  if (colon == std::string_view::npos) return {};
  return sig.substr(1, colon - 1);
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

// Projection of a sensitive relation onto its insensitive columns.
Relation project(const Relation& r, std::vector<std::size_t> keep, CsvRow header) {
  std::set<CsvRow> rows;
  for (const auto& row : r.rows) {
    CsvRow out;
    for (std::size_t k : keep) out.push_back(row.at(k));
    rows.insert(std::move(out));
  }
  Relation p{r.name, std::move(header), {}};
  assign_rows(p, std::move(rows));
  return p;
}

class FactBuilder {
 public:
  FactBuilder(const HeapGraph& graph, const AbstractionTable& table,
              const EnricherBindings& bindings, const ContextBuilder& contexts,
              const EnricherNames& names, std::vector<std::string>* warnings)
      : graph_(graph),
        table_(table),
        bindings_(bindings),
        ctx_(contexts),
        names_(names),
        warnings_(warnings),
        cfg_(contexts.config()),
        sensitive_(cfg_.sensitive()) {}

  FactSet build() {
    FactSet fs = empty_facts(sensitive_);
    object_fields(fs.object_field_value);
    static_fields(fs.static_field_value);
    array_contents(fs.array_contents_value);
    call_edges(fs.call_graph_edge);
    reachable(fs.reachable);
    return fs;
  }

 private:
  bool instrumentation(ObjectId id) const {
    return bindings_.instrumentation_objects.contains(id);
  }

  bool instrumentation_class(std::string_view cls) const {
    return matches_enricher_name(cls, names_.obj_ctx_class) ||
           matches_enricher_name(cls, names_.edge_ctx_class) ||
           matches_enricher_name(cls, names_.class_data_class);
  }

  bool instrumentation_method(std::string_view sig) const {
    return instrumentation_class(signature_class(sig));
  }

  bool program_ref(const Value& v) const {
    return v.kind == Value::Kind::kObject && !instrumentation(v.ref) &&
           table_.contains(v.ref);
  }

  const std::string& key(ObjectId id) const { return table_.at(id).key; }

  const std::string& hctx(ObjectId id, std::uint32_t order) {
    auto& cache = order == cfg_.m ? heap_cache_ : base_cache_;
    auto it = cache.find(id);
    if (it == cache.end()) {
      it = cache.emplace(id, format_context(ctx_.heap_context(id, order))).first;
    }
    return it->second;
  }

  std::string padded(std::uint32_t order) const {
    return format_context(ContextTuple(order, std::string(kImmutableContext)));
  }

  void object_fields(Relation& r) {
    std::set<CsvRow> rows;
    for (const auto& [id, o] : graph_.objects) {
      if (o.kind != ObjectKind::kInstance || instrumentation(id)) continue;
      for (const auto& f : o.fields) {
        if (!program_ref(f.value)) continue;
        if (sensitive_) {
          rows.insert({hctx(id, cfg_.n), key(id), f.name, hctx(f.value.ref, cfg_.m),
                       key(f.value.ref)});
        } else {
          rows.insert({key(id), f.name, key(f.value.ref)});
        }
      }
    }
    assign_rows(r, std::move(rows));
  }

  void static_fields(Relation& r) {
    std::set<CsvRow> rows;
    for (const auto& [id, c] : graph_.classes) {
      if (instrumentation_class(c.fq_name)) continue;
      for (const auto& f : c.static_fields) {
        if (!program_ref(f.value)) continue;
        if (sensitive_) {
          rows.insert({c.fq_name, f.name, hctx(f.value.ref, cfg_.m), key(f.value.ref)});
        } else {
          rows.insert({c.fq_name, f.name, key(f.value.ref)});
        }
      }
    }
    assign_rows(r, std::move(rows));
  }

  void array_contents(Relation& r) {
    std::set<CsvRow> rows;
    for (const auto& [id, o] : graph_.objects) {
      if (o.kind != ObjectKind::kObjectArray || instrumentation(id)) continue;
      for (const auto& e : o.elements) {
        if (!program_ref(e)) continue;
        if (sensitive_) {
          rows.insert({hctx(id, cfg_.m), key(id), hctx(e.ref, cfg_.m), key(e.ref)});
        } else {
          rows.insert({key(id), key(e.ref)});
        }
      }
    }
    assign_rows(r, std::move(rows));
  }

  void add_edge(std::set<CsvRow>& rows, const std::string& caller_ctx,
                const std::string& invocation, const std::string& callee_ctx,
                const std::string& callee) {
    if (sensitive_) {
      rows.insert({caller_ctx, invocation, callee_ctx, callee});
    } else {
      rows.insert({invocation, callee});
    }
    callees_.emplace(callee_ctx, callee);
  }

  void call_edges(Relation& r) {
    std::set<CsvRow> rows;
    const std::string pad_n = padded(cfg_.n);
    const std::string none = format_context({});

    // Enrichment edges carry concrete contexts.
    std::set<std::pair<std::string, std::string>> qualified;
    for (const auto& e : edges_from_edgectx(bindings_, graph_, warnings_)) {
      if (instrumentation_method(e.callee_method) ||
          instrumentation_method(e.caller_method)) {
        continue;
      }
      DynCallEdge plain{e.caller_method, e.caller_line, e.callee_method, {}, {}};
      std::string inv = plain.invocation();
      std::string caller_ctx = none, callee_ctx = none;
      if (cfg_.flavor == Flavor::kCallSite) {
        caller_ctx = format_context(ctx_.call_site_context(*e.trace, 2, cfg_.n));
        callee_ctx = format_context(ctx_.call_site_context(*e.trace, 1, cfg_.n));
      } else if (sensitive_) {
        // A static callee has no receiver and inherits the caller's context.
        auto callee_obj = e.callee_ctx ? e.callee_ctx : e.caller_ctx;
        caller_ctx = format_context(ctx_.calling_context(e.caller_ctx, cfg_.n));
        callee_ctx = format_context(ctx_.calling_context(callee_obj, cfg_.n));
      }
      add_edge(rows, caller_ctx, inv, callee_ctx, e.callee_method);
      qualified.emplace(inv, e.callee_method);
    }

    if (cfg_.flavor == Flavor::kCallSite) {
      for (const auto& [serial, trace] : graph_.traces) {
        for (std::size_t i = 0; i + 1 < trace.frames.size(); ++i) {
          const FrameView& callee = trace.frames[i];
          const FrameView& caller = trace.frames[i + 1];
          if (instrumentation_class(callee.class_name) ||
              instrumentation_class(caller.class_name)) {
            continue;
          }
          DynCallEdge plain{caller.signature(), caller.line, callee.signature(), {}, {}};
          add_edge(rows, format_context(ctx_.call_site_context(trace, i + 1, cfg_.n)),
                   plain.invocation(),
                   format_context(ctx_.call_site_context(trace, i, cfg_.n)),
                   plain.callee_method);
        }
      }
    } else {
      for (const auto& e : edges_from_traces(graph_)) {
        if (instrumentation_method(e.callee_method) ||
            instrumentation_method(e.caller_method)) {
          continue;
        }
        std::string inv = e.invocation();
        if (sensitive_ && qualified.contains({inv, e.callee_method})) continue;
        const std::string& c = sensitive_ ? pad_n : none;
        add_edge(rows, c, inv, c, e.callee_method);
      }
    }
    assign_rows(r, std::move(rows));
  }

  void reachable(Relation& r) {
    std::set<CsvRow> rows;
    std::set<std::string> with_row;
    for (const auto& [ctx, method] : callees_) {
      rows.insert(sensitive_ ? CsvRow{ctx, method} : CsvRow{method});
      with_row.insert(method);
    }
    const std::string pad_n = padded(cfg_.n);
    for (const auto& [serial, trace] : graph_.traces) {
      for (std::size_t j = 0; j < trace.frames.size(); ++j) {
        const FrameView& f = trace.frames[j];
        if (instrumentation_class(f.class_name)) continue;
        std::string method = f.signature();
        if (!sensitive_) {
          rows.insert({method});
        } else if (cfg_.flavor == Flavor::kCallSite) {
          rows.insert({format_context(ctx_.call_site_context(trace, j, cfg_.n)), method});
        } else if (!with_row.contains(method)) {
          rows.insert({pad_n, method});
        }
      }
    }
    assign_rows(r, std::move(rows));
  }

  const HeapGraph& graph_;
  const AbstractionTable& table_;
  const EnricherBindings& bindings_;
  const ContextBuilder& ctx_;
  const EnricherNames& names_;
  std::vector<std::string>* warnings_;
  SensitivityConfig cfg_;
  bool sensitive_;
  std::unordered_map<ObjectId, std::string> heap_cache_;
  std::unordered_map<ObjectId, std::string> base_cache_;
  std::set<std::pair<std::string, std::string>> callees_;
};

std::string sanitize(std::string_view key) {
  std::string out;
  for (char c : key) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-' ||
              c == '#';
    out += ok ? c : '_';
  }
  return out;
}

// Target of a reference field of a ClassData instance; null when the field
// is null and `allow_null`.
const ConcreteObject* ref_target(const HeapGraph& graph, const ConcreteObject& o,
                                 std::string_view field, bool allow_null) {
  const Value* v = o.field(field);
  if (!v || v->kind == Value::Kind::kPrimitive) {
    throw EnricherShapeMismatch(o.type_name + " instance " + hex(o.id) +
                                " has no reference field '" + std::string(field) +
                                "'");
  }
  if (v->kind == Value::Kind::kNull && allow_null) return nullptr;
  if (v->kind != Value::Kind::kObject) {
    throw EnricherShapeMismatch(o.type_name + " " + hex(o.id) + "." +
                                std::string(field) + " is null or dangling");
  }
  return graph.object(v->ref);
}

}  // namespace

std::string Relation::to_csv() const {
  std::string out = csv_line(header);
  for (const auto& row : rows) out += csv_line(row);
  return out;
}

std::vector<const Relation*> FactSet::relations() const {
  return {&object_field_value, &static_field_value, &array_contents_value,
          &call_graph_edge, &reachable};
}

FactSet empty_facts(bool s) {
  FactSet fs;
  fs.object_field_value = make_relation("ObjectFieldValue", {"obj", "field", "value"},
                                        {"ctx", "obj", "field", "hctx", "value"}, s);
  fs.static_field_value = make_relation("StaticFieldValue", {"class", "field", "value"},
                                        {"class", "field", "hctx", "value"}, s);
  fs.array_contents_value =
      make_relation("ArrayContentsValue", {"obj", "value"},
                    {"hctx_obj", "obj", "hctx_val", "value"}, s);
  fs.call_graph_edge = make_relation("CallGraphEdge", {"invocation", "method"},
                                     {"callerCtx", "invocation", "calleeCtx", "method"}, s);
  fs.reachable = make_relation("Reachable", {"method"}, {"ctx", "method"}, s);
  return fs;
}

FactSet drop_contexts(const FactSet& s) {
  FactSet base = empty_facts(false);
  FactSet out;
  out.object_field_value =
      project(s.object_field_value, {1, 2, 4}, base.object_field_value.header);
  out.static_field_value =
      project(s.static_field_value, {0, 1, 3}, base.static_field_value.header);
  out.array_contents_value =
      project(s.array_contents_value, {1, 3}, base.array_contents_value.header);
  out.call_graph_edge = project(s.call_graph_edge, {1, 3}, base.call_graph_edge.header);
  out.reachable = project(s.reachable, {1}, base.reachable.header);
  return out;
}

FactSet build_fact_set(const HeapGraph& graph, const AbstractionTable& table,
                       const EnricherBindings& bindings,
                       const ContextBuilder& contexts, const EnricherNames& names,
                       std::vector<std::string>* warnings) {
  return FactBuilder(graph, table, bindings, contexts, names, warnings).build();
}

FactResult build_facts(const HeapGraph& graph, const CodeModel& code,
                       const FactOptions& options) {
  FactResult r;
  r.table = abstraction_table(graph, code, options.abstraction);
  r.bindings = recognize_enrichers(graph, options.enrichers);
  r.warnings = graph.warnings;
  r.warnings.insert(r.warnings.end(), code.warnings.begin(), code.warnings.end());
  r.warnings.insert(r.warnings.end(), r.bindings.warnings.begin(),
                    r.bindings.warnings.end());
  ContextBuilder contexts(graph, r.bindings, r.table, options.abstraction,
                          options.sensitivity);
  r.facts = build_fact_set(graph, r.table, r.bindings, contexts, options.enrichers,
                           &r.warnings);
  return r;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

std::string utc_timestamp_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<fs::path> export_facts(const FactSet& facts, const fs::path& out_dir,
                                   const ManifestInfo& info) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const Relation* r : facts.relations()) {
    std::string text = r->to_csv();
    fs::path p = out_dir / r->file_name();
    internal::write_file(p, text);
    written.push_back(p);
    files.push_back({{"name", r->file_name()},
                     {"rows", r->rows.size()},
                     {"sha256", sha256_hex(std::span(
                                    reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()))}});
  }
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : info.config) config[k] = v;
  nlohmann::ordered_json manifest = {
      {"tool", "heapfacts"},
      {"version", kToolVersion},
      {"config", config},
      {"dump_sha256", info.dump_sha256},
      {"warning_count", info.warning_count},
      {"files", files},
      {"generated_at", info.generated_at},
  };
  fs::path mp = out_dir / "manifest.json";
  internal::write_file(mp, manifest.dump(2) + "\n");
  written.push_back(mp);
  return written;
}

std::string ClassData::archive_path() const {
  return "loader_" + sanitize(loader_key) + "/" + internal_name(fq_name) + ".class";
}

std::vector<ClassData> extract_class_data(const HeapGraph& graph,
                                          const AbstractionTable& table,
                                          const EnricherNames& names,
                                          std::vector<std::string>* warnings) {
  auto warn = [warnings](std::string m) {
    if (warnings) warnings->push_back(std::move(m));
  };
  std::vector<ClassData> found;
  std::set<std::pair<std::string, ObjectId>> seen;
  for (const auto& [id, o] : graph.objects) {
    if (o.kind != ObjectKind::kInstance ||
        !matches_enricher_name(o.type_name, names.class_data_class)) {
      continue;
    }
    const ConcreteObject* name_obj = ref_target(graph, o, "name", false);
    const ConcreteObject* loader_obj = ref_target(graph, o, "loader", true);
    const ConcreteObject* code_obj = ref_target(graph, o, "bytecode", false);
    std::optional<std::string> name;
    if (name_obj) name = decode_string(*name_obj, graph);
    if (!name) {
      throw EnricherShapeMismatch("ClassData " + hex(id) + ".name is not a String");
    }
    if (!code_obj || code_obj->kind != ObjectKind::kPrimitiveArray ||
        code_obj->element_type != BasicType::kByte) {
      throw EnricherShapeMismatch("ClassData " + hex(id) + ".bytecode is not a byte[]");
    }
    ClassData cd;
    cd.fq_name = dotted_name(*name);
    cd.loader_id = loader_obj ? loader_obj->id : 0;
    cd.bytecode = code_obj->primitive_data;
    if (cd.bytecode.size() < 4 || cd.bytecode[0] != 0xCA || cd.bytecode[1] != 0xFE ||
        cd.bytecode[2] != 0xBA || cd.bytecode[3] != 0xBE) {
      warn("ClassData for " + cd.fq_name + " does not hold class-file bytes; skipped");
      continue;
    }
    if (!seen.emplace(cd.fq_name, cd.loader_id).second) {
      warn("class " + cd.fq_name + " captured twice for loader " + hex(cd.loader_id) +
           "; keeping the first");
      continue;
    }
    found.push_back(std::move(cd));
  }

  // Abstract loader keys, made distinct per concrete loader.
  std::map<std::string, std::set<ObjectId>> loaders_by_key;
  auto base_key = [&table](ObjectId loader) -> std::string {
    if (loader == 0) return "bootstrap";
    auto it = table.find(loader);
    return it == table.end() ? dummy_key(kUnknownClassName) : it->second.key;
  };
  for (const auto& cd : found) loaders_by_key[base_key(cd.loader_id)].insert(cd.loader_id);
  for (auto& cd : found) {
    std::string k = base_key(cd.loader_id);
    const auto& ids = loaders_by_key[k];
    if (ids.size() > 1) {
      auto rank = std::distance(ids.begin(), ids.find(cd.loader_id)) + 1;
      k += "#" + std::to_string(rank);
    }
    cd.loader_key = std::move(k);
  }
  std::sort(found.begin(), found.end(), [](const ClassData& a, const ClassData& b) {
    return a.archive_path() < b.archive_path();
  });
  std::vector<ClassData> out;
  for (auto& cd : found) {
    if (!out.empty() && out.back().archive_path() == cd.archive_path()) {
      warn("archive path " + cd.archive_path() + " is ambiguous; keeping the first");
      continue;
    }
    out.push_back(std::move(cd));
  }
  return out;
}

std::vector<std::uint8_t> class_archive_bytes(const std::vector<ClassData>& classes) {
  std::vector<ZipEntry> entries;
  for (const auto& cd : classes) entries.push_back({cd.archive_path(), cd.bytecode});
  return write_zip(std::move(entries));
}

std::vector<ClassData> extract_class_archive(const HeapGraph& graph,
                                             const AbstractionTable& table,
                                             const EnricherNames& names,
                                             const fs::path& archive,
                                             std::vector<std::string>* warnings) {
  auto classes = extract_class_data(graph, table, names, warnings);
  if (archive.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(archive.parent_path(), ec);
  }
  internal::write_file(archive, class_archive_bytes(classes));
  return classes;
}

CodeModel merged_code_inputs(CodeModel code, const std::vector<ClassData>& classes) {
  for (const auto& cd : classes) {
    std::string origin = "recovered " + cd.archive_path();
    try {
      code.add_class(parse_class(cd.bytecode), origin);
    } catch (const MalformedClassFile& e) {
      code.warnings.push_back(origin + ": " + e.what());
    }
  }
  return code;
}

}  // namespace heapfacts
