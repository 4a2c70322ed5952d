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

#include <gtest/gtest.h>

#include <json.hpp>

#include "byte_io.h"
#include "file_io.h"
#include "heapfacts/dump_synth.h"
#include "heapfacts/errors.h"
#include "heapfacts/hprof_reader.h"
#include "heapfacts/zip_archive.h"
#include "support/context_oracle.h"
#include "support/test_util.h"

namespace heapfacts {
namespace {

HeapGraph graph_of(const SynthProgram& p) {
  return build_heap(hprof::parse_dump(emit(p)));
}

const std::string kMain = "<app.Main: void main(java.lang.String[])>";
const std::string kH = kMain + "/new app.Holder/0";
const std::string kI0 = kMain + "/new app.Item/0";
const std::string kI1 = kMain + "/new app.Item/1";
const std::string kA = kMain + "/new app.Item[]/0";
const std::string kPad1 = "[<<immutable-context>>]";

struct SmallHeap {
  SynthProgram p;
  CodeModel code;
};

SmallHeap small_heap() {
  SmallHeap s;
  SynthProgram& p = s.p;
  p.add_class("app.Holder", "java.lang.Object",
              {{"f", BasicType::kObject}, {"g", BasicType::kObject}, {"n", BasicType::kInt}});
  p.add_class("app.Item");
  auto at = [&](std::uint32_t line) {
    return p.add_trace({frame("app.Main", "main", "([Ljava/lang/String;)V", line)});
  };
  ObjectId h = p.new_instance("app.Holder", at(5));
  ObjectId i1 = p.new_instance(
      "app.Item", p.add_trace({frame("app.Item", "<init>", "()V", 1),
                               frame("app.Main", "main", "([Ljava/lang/String;)V", 6)}));
  ObjectId i2 = p.new_instance("app.Item", at(7));
  ObjectId arr = p.new_object_array("app.Item", {Value::object(i1), Value::object(i2),
                                                 Value::null()}, at(8));
  p.set_field(h, "f", Value::object(i1));
  p.set_field(h, "g", Value::object(arr));
  p.set_field(h, "n", Value::primitive(BasicType::kInt, 3));
  p.add_static("app.Holder", {"INSTANCE", BasicType::kObject}, Value::object(h));
  p.new_obj_and_ctx(i1, h);
  s.code = load_site_map(kMain + "\tapp.Holder\t5\t0\n" + kMain + "\tapp.Item\t6\t0\n" +
                         kMain + "\tapp.Item\t7\t1\n" + kMain + "\tapp.Item[]\t8\t0\n");
  return s;
}

std::vector<CsvRow> rows(const Relation& r) { return r.rows; }

TEST(FactExport, Headers) {
  FactSet i = empty_facts(false);
  FactSet s = empty_facts(true);
  EXPECT_EQ(i.call_graph_edge.header, (CsvRow{"invocation", "method"}));
  EXPECT_EQ(s.call_graph_edge.header, (CsvRow{"callerCtx", "invocation", "calleeCtx", "method"}));
  EXPECT_EQ(s.object_field_value.header, (CsvRow{"ctx", "obj", "field", "hctx", "value"}));
  EXPECT_EQ(s.array_contents_value.header, (CsvRow{"hctx_obj", "obj", "hctx_val", "value"}));
  EXPECT_EQ(s.reachable.header, (CsvRow{"ctx", "method"}));
  EXPECT_EQ(i.reachable.file_name(), "Reachable.csv");
  ASSERT_EQ(i.relations().size(), 5u);
  EXPECT_EQ(i.relations()[3]->name, "CallGraphEdge");
}

TEST(FactExport, InsensitiveGolden) {
  SmallHeap s = small_heap();
  HeapGraph g = graph_of(s.p);
  FactResult r = build_facts(g, s.code, {});
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(rows(r.facts.object_field_value),
            (std::vector<CsvRow>{{kH, "f", kI0}, {kH, "g", kA}}));
  EXPECT_EQ(rows(r.facts.static_field_value),
            (std::vector<CsvRow>{{"app.Holder", "INSTANCE", kH}}));
  EXPECT_EQ(rows(r.facts.array_contents_value), (std::vector<CsvRow>{{kA, kI0}, {kA, kI1}}));
  EXPECT_EQ(rows(r.facts.call_graph_edge),
            (std::vector<CsvRow>{{kMain + "/6", "<app.Item: void <init>()>"}}));
  EXPECT_EQ(rows(r.facts.reachable),
            (std::vector<CsvRow>{{"<app.Item: void <init>()>"}, {kMain}}));
}

TEST(FactExport, ObjectSensitiveGolden) {
  SmallHeap s = small_heap();
  HeapGraph g = graph_of(s.p);
  FactOptions opt;
  opt.sensitivity = {Flavor::kObject, 1, 1};
  FactResult r = build_facts(g, s.code, opt);
  const std::string hH = "[" + kH + "]";
  EXPECT_EQ(rows(r.facts.object_field_value),
            (std::vector<CsvRow>{{kPad1, kH, "f", hH, kI0}, {kPad1, kH, "g", kPad1, kA}}));
  EXPECT_EQ(rows(r.facts.static_field_value),
            (std::vector<CsvRow>{{"app.Holder", "INSTANCE", kPad1, kH}}));
  EXPECT_EQ(rows(r.facts.array_contents_value),
            (std::vector<CsvRow>{{kPad1, kA, kPad1, kI1}, {kPad1, kA, hH, kI0}}));
  EXPECT_EQ(rows(r.facts.call_graph_edge),
            (std::vector<CsvRow>{{kPad1, kMain + "/6", kPad1, "<app.Item: void <init>()>"}}));
  EXPECT_EQ(rows(r.facts.reachable),
            (std::vector<CsvRow>{{kPad1, "<app.Item: void <init>()>"}, {kPad1, kMain}}));
}

TEST(FactExport, EdgeCtxEdgesCarryContexts) {
  testing::ChainFixture f = testing::make_chain_fixture(3);
  SynthProgram& p = f.program;
  auto t = p.add_trace({frame("heapdl.EdgeCtx", "<init>", "()V", 1),
                        frame("app.Util", "helper", "()Lapp/Node;", 50),
                        frame("app.C1", "make", "()Lapp/Node;", 11),
                        frame("app.Main", "main", "([Ljava/lang/String;)V", 3)});
  // Static callee: no callee receiver.
  p.new_edge_ctx(f.receivers[1], std::nullopt, t);
  HeapGraph g = graph_of(p);
  CodeModel code = load_site_map(f.site_map);
  FactOptions opt;
  opt.sensitivity = {Flavor::kObject, 2, 1};
  FactResult r = build_facts(g, code, opt);
  const std::string ctx = "[<app.C1: app.Node make()>/new app.Node/0, "
                          "<app.C2: app.Node make()>/new app.Node/0]";
  CsvRow want{ctx, "<app.C1: app.Node make()>/11", ctx, "<app.Util: app.Node helper()>"};
  bool found = false;
  for (const auto& row : r.facts.call_graph_edge.rows) {
    EXPECT_EQ(row[3].find("heapdl"), std::string::npos);
    EXPECT_EQ(row[1].find("heapdl"), std::string::npos);
    if (row == want) found = true;
  }
  EXPECT_TRUE(found);
  // The same edge is not repeated with padded contexts.
  for (const auto& row : r.facts.call_graph_edge.rows) {
    if (row[1] == want[1] && row[3] == want[3]) EXPECT_EQ(row, want);
  }
}

TEST(FactExport, DropContextsEqualsInsensitive) {
  const char* configs[] = {"object:1:1", "object:2:1", "type:2:2", "call-site:2:1"};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SynthProgram p = random_program(seed);
    HeapGraph g = graph_of(p);
    CodeModel code = load_site_map(site_map_text(p));
    FactResult base = build_facts(g, code, {});
    for (const char* c : configs) {
      FactOptions opt;
      opt.sensitivity = *SensitivityConfig::parse(c);
      FactResult s = build_facts(g, code, opt);
      FactSet dropped = drop_contexts(s.facts);
      for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(dropped.relations()[i]->rows, base.facts.relations()[i]->rows)
            << "seed " << seed << " " << c << " " << base.facts.relations()[i]->name;
        EXPECT_EQ(dropped.relations()[i]->header, base.facts.relations()[i]->header);
      }
    }
  }
}

TEST(FactExport, CsvQuoting) {
  Relation r{"R", {"a", "b"}, {{"x,y", "say \"hi\""}, {"line\nbreak", "plain"}}};
  EXPECT_EQ(r.to_csv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n\"line\nbreak\",plain\n");
  EXPECT_EQ(parse_csv(r.to_csv()),
            (std::vector<CsvRow>{{"a", "b"}, {"x,y", "say \"hi\""}, {"line\nbreak", "plain"}}));
  EXPECT_THROW(parse_csv("\"open\n"), Error);
}

TEST(FactExport, Sha256KnownVector) {
  std::string abc = "abc";
  std::vector<std::uint8_t> bytes(abc.begin(), abc.end());
  EXPECT_EQ(sha256_hex(bytes),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(utc_timestamp_now().size(), 20u);
}

TEST(FactExport, WritesFilesAndManifest) {
  SmallHeap s = small_heap();
  HeapGraph g = graph_of(s.p);
  FactResult r = build_facts(g, s.code, {});
  testing::TempDir dir;
  ManifestInfo info;
  info.config = {{"sensitivity", "insensitive"}};
  info.dump_sha256 = "00";
  info.generated_at = "2026-01-01T00:00:00Z";
  auto written = export_facts(r.facts, dir / "out", info);
  ASSERT_EQ(written.size(), 6u);
  std::string csv = internal::read_text_file(dir / "out/StaticFieldValue.csv");
  EXPECT_EQ(csv, "class,field,value\napp.Holder,INSTANCE," + kH + "\n");
  auto m = nlohmann::ordered_json::parse(internal::read_text_file(dir / "out/manifest.json"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : m.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"tool", "version", "config", "dump_sha256",
                                            "warning_count", "files", "generated_at"}));
  EXPECT_EQ(m["files"][1]["name"], "StaticFieldValue.csv");
  EXPECT_EQ(m["files"][1]["rows"], 1);
  std::vector<std::uint8_t> bytes(csv.begin(), csv.end());
  EXPECT_EQ(m["files"][1]["sha256"], sha256_hex(bytes));
  EXPECT_EQ(m["config"]["sensitivity"], "insensitive");
}

std::vector<std::uint8_t> tiny_class(const std::string& internal) {
  internal::ByteSink b;
  b.u4(0xCAFEBABE);
  b.u2(0);
  b.u2(49);
  b.u2(5);
  b.u1(1);
  b.u2(static_cast<std::uint16_t>(internal.size()));
  b.str(internal);
  b.u1(7);
  b.u2(1);
  b.u1(1);
  b.u2(16);
  b.str("java/lang/Object");
  b.u1(7);
  b.u2(3);
  b.u2(0x21);
  b.u2(2);
  b.u2(4);
  for (int i = 0; i < 4; ++i) b.u2(0);
  return b.buffer();
}

TEST(FactExport, ClassDataRecovery) {
  SynthProgram p;
  p.add_class("app.Loader");
  ObjectId l1 = p.new_instance("app.Loader");
  ObjectId l2 = p.new_instance("app.Loader");
  auto bytes = tiny_class("gen/Dyn");
  p.new_class_data("gen.Dyn", l1, bytes);
  p.new_class_data("gen.Dyn", l2, bytes);
  p.new_class_data("gen.Dyn", l2, bytes);             // same loader again
  p.new_class_data("gen.Boot", std::nullopt, tiny_class("gen/Boot"));
  p.new_class_data("gen.Junk", l1, {1, 2, 3});        // no class-file magic
  HeapGraph g = graph_of(p);
  AbstractionTable table = abstraction_table(g, CodeModel{}, {});
  std::vector<std::string> warnings;
  auto classes = extract_class_data(g, table, EnricherNames{}, &warnings);
  EXPECT_EQ(warnings.size(), 2u);
  ASSERT_EQ(classes.size(), 3u);
  const std::string key = "loader__dynamic_app.Loader__unknown_site__";
  EXPECT_EQ(classes[0].archive_path(), key + "#1/gen/Dyn.class");
  EXPECT_EQ(classes[1].archive_path(), key + "#2/gen/Dyn.class");
  EXPECT_EQ(classes[2].archive_path(), "loader_bootstrap/gen/Boot.class");
  EXPECT_EQ(classes[0].loader_id, l1);
  EXPECT_EQ(classes[1].loader_id, l2);
  EXPECT_EQ(classes[1].bytecode, bytes);

  testing::TempDir dir;
  extract_class_archive(g, table, EnricherNames{}, dir / "c.jar", nullptr);
  std::vector<std::string> zw;
  auto entries = read_zip(internal::read_file(dir / "c.jar"), &zw);
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].data, bytes);

  CodeModel merged = merged_code_inputs(CodeModel{}, classes);
  EXPECT_EQ(merged.classes_seen, (std::set<std::string>{"gen.Boot", "gen.Dyn"}));
  EXPECT_EQ(merged.warnings.size(), 1u);
}

TEST(FactExport, ClassDataShapeMismatch) {
  SynthProgram p;
  p.add_class("heapdl.ClassData", "java.lang.Object", {{"name", BasicType::kObject}});
  p.new_instance("heapdl.ClassData");
  HeapGraph g = graph_of(p);
  AbstractionTable table = abstraction_table(g, CodeModel{}, {});
  EXPECT_THROW(extract_class_data(g, table, EnricherNames{}, nullptr), EnricherShapeMismatch);
}

}  // namespace
}  // namespace heapfacts
