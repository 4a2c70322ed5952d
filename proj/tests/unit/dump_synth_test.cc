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

#include <gtest/gtest.h>

#include "heapfacts/code_model.h"
#include "heapfacts/errors.h"
#include "heapfacts/hprof_reader.h"
#include "support/synth_oracle.h"

namespace heapfacts {
namespace {

TEST(DumpSynth, RoundTripAcrossSeedsAndIdSizes) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    SynthProgram p = random_program(seed);
    EmitOptions opt;
    opt.id_size = seed % 2 ? 4 : 8;
    opt.segment_records = seed % 3 == 0 ? 7 : 0;
    HeapGraph g = build_heap(hprof::parse_dump(emit(p, opt)));
    auto diffs = testing::compare_round_trip(p, g);
    EXPECT_TRUE(diffs.empty()) << "seed " << seed << ": " << diffs.front();
  }
}

TEST(DumpSynth, Deterministic) {
  EXPECT_EQ(emit(random_program(42)), emit(random_program(42)));
  EXPECT_NE(emit(random_program(42)), emit(random_program(43)));
  EXPECT_EQ(site_map_text(random_program(9)), site_map_text(random_program(9)));
}

TEST(DumpSynth, EmptyProgramIsHeaderAndEnd) {
  SynthProgram p;
  auto raw = hprof::parse_dump(emit(p));
  EXPECT_TRUE(raw.warnings.empty());
  ASSERT_EQ(raw.records.size(), 1u);
  HeapGraph g = build_heap(raw);
  EXPECT_TRUE(g.objects.empty());
}

TEST(DumpSynth, BothStringLayouts) {
  for (StringLayout layout : {StringLayout::kCharArray, StringLayout::kByteArray}) {
    SynthProgram p(layout);
    ObjectId a = p.new_string("plain");
    ObjectId b = p.new_string("caf\xC3\xA9 \xE2\x82\xAC");
    HeapGraph g = build_heap(hprof::parse_dump(emit(p)));
    EXPECT_EQ(decode_string(*g.object(a), g), "plain");
    EXPECT_EQ(decode_string(*g.object(b), g), "caf\xC3\xA9 \xE2\x82\xAC");
    EXPECT_TRUE(testing::compare_round_trip(p, g).empty());
  }
}

TEST(DumpSynth, RejectsInconsistentPrograms) {
  {
    SynthProgram p;
    p.add_class("a.B", "a.Missing");
    EXPECT_THROW(emit(p), InconsistentProgram);
  }
  {
    SynthProgram p;
    p.add_class("a.C", "java.lang.Object", {{"f", BasicType::kObject}});
    ObjectId o = p.new_instance("a.C");
    p.set_field(o, "f", Value::object(0xDEAD0));
    EXPECT_THROW(emit(p), InconsistentProgram);
  }
  {
    SynthProgram p;
    p.new_object_array("java.lang.Object", {Value::dangling(0x77770)});
    EXPECT_THROW(emit(p), InconsistentProgram);
  }
  {
    SynthProgram p;
    p.add_class("a.C");
    p.new_instance("a.C", 3);
    EXPECT_THROW(emit(p), InconsistentProgram);
  }
  {
    SynthProgram p;
    p.add_root(0x5550);
    EXPECT_THROW(emit(p), InconsistentProgram);
  }
  {
    SynthProgram p;
    p.add_class("a.C", "java.lang.Object", {{"n", BasicType::kInt}});
    ObjectId o = p.new_instance("a.C");
    EXPECT_THROW(p.set_field(o, "n", Value::null()), InconsistentProgram);
    EXPECT_THROW(p.set_field(o, "missing", Value::null()), InconsistentProgram);
    EXPECT_THROW(p.add_static("a.Nope", {"S", BasicType::kInt},
                              Value::primitive(BasicType::kInt, 1)),
                 InconsistentProgram);
  }
  {
    SynthProgram p;
    EmitOptions opt;
    opt.id_size = 2;
    EXPECT_THROW(emit(p, opt), InconsistentProgram);
  }
}

TEST(DumpSynth, SiteMapListsDeclaredSites) {
  SynthProgram p;
  p.declare_site({"<a.M: void run()>", "a.C", 12, 0});
  p.declare_site({"<a.M: void run()>", "a.C", std::nullopt, 1});
  EXPECT_EQ(site_map_text(p), "<a.M: void run()>\ta.C\t12\t0\n<a.M: void run()>\ta.C\t-\t1\n");
  CodeModel code = load_site_map(site_map_text(random_program(5)));
  EXPECT_EQ(code.methods.size() > 0, !random_program(5).declared_sites().empty());
}

TEST(DumpSynth, RandomProgramsCarryEnrichment) {
  std::size_t with_ctx = 0, with_edges = 0, with_classes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthProgram p = random_program(seed);
    with_ctx += p.find_class(SynthProgram::kObjAndCtx) != nullptr;
    with_edges += p.find_class(SynthProgram::kEdgeCtx) != nullptr;
    with_classes += p.find_class(SynthProgram::kClassData) != nullptr;
  }
  EXPECT_GT(with_ctx, 0u);
  EXPECT_GT(with_edges, 0u);
  EXPECT_GT(with_classes, 0u);

  RandomParams plain;
  plain.enrichers = false;
  plain.class_data = false;
  SynthProgram p = random_program(1, plain);
  EXPECT_EQ(p.find_class(SynthProgram::kObjAndCtx), nullptr);
  EXPECT_EQ(p.find_class(SynthProgram::kClassData), nullptr);
}

}  // namespace
}  // namespace heapfacts
