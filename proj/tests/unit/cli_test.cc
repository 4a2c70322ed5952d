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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "file_io.h"
#include "heapfacts/dump_synth.h"
#include "heapfacts/recall_eval.h"
#include "support/test_util.h"

namespace heapfacts {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_header_only(const testing::TempDir& dir) {
  std::string bytes = std::string("JAVA PROFILE 1.0.2") + '\0';
  bytes += std::string("\0\0\0\x08", 4);
  bytes += std::string(8, '\0');
  fs::path p = dir / "empty.hprof";
  internal::write_file(p, bytes);
  return p.string();
}

std::string synth(const testing::TempDir& dir, int seed) {
  std::string path = (dir / ("s" + std::to_string(seed) + ".hprof")).string();
  CliRun r = run({"synth", "--seed", std::to_string(seed), "--out", path});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  return path;
}

TEST(Cli, StatsOnHeaderOnlyDump) {
  testing::TempDir dir;
  CliRun r = run({"stats", write_header_only(dir)});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("id_size 8\n"), std::string::npos);
  EXPECT_NE(r.out.find("objects 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("classes 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("warnings 0\n"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  testing::TempDir dir;
  std::string dump = write_header_only(dir);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"stats", dump, "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"stats", (dir / "missing.hprof").string()}).code, cli::kExitUsage);
  CliRun bad = run({"facts", dump, "--sensitivity", "object:0:1"});
  EXPECT_EQ(bad.code, cli::kExitUsage);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(run({"recall", "--reference", dump, "--observed", dump, "--exact",
                 "--method-pair"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"synth", "--seed", "1", "--out", (dir / "x").string(), "--id-size", "2"}).code,
            cli::kExitUsage);
}

TEST(Cli, MalformedDumpIsFatal) {
  testing::TempDir dir;
  fs::path p = dir / "junk.hprof";
  internal::write_file(p, std::vector<std::uint8_t>{'n', 'o', 'p', 'e'});
  CliRun r = run({"stats", p.string()});
  EXPECT_EQ(r.code, cli::kExitFatal);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST(Cli, FactsWritesRelationsAndManifest) {
  testing::TempDir dir;
  std::string dump = synth(dir, 7);
  std::string out = (dir / "facts").string();
  CliRun r = run({"facts", dump, "--site-map", dump + ".sites.tsv", "--sensitivity", "object:2:1",
               "--out", out});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* name : {"ObjectFieldValue", "StaticFieldValue", "ArrayContentsValue",
                           "CallGraphEdge", "Reachable"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / (std::string(name) + ".csv"))) << name;
    EXPECT_NE(r.out.find(std::string(name) + " "), std::string::npos);
  }
  auto m = nlohmann::json::parse(internal::read_text_file(fs::path(out) / "manifest.json"));
  EXPECT_EQ(m["config"]["sensitivity"], "object:2:1");
  EXPECT_EQ(m["dump_sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(m["files"].size(), 5u);
  std::string header = internal::read_text_file(fs::path(out) / "CallGraphEdge.csv");
  EXPECT_EQ(header.rfind("callerCtx,invocation,calleeCtx,method\n", 0), 0u);
}

TEST(Cli, SynthThenRecallOfItself) {
  testing::TempDir dir;
  std::string dump = synth(dir, 11);
  EXPECT_TRUE(fs::exists(dump + ".sites.tsv"));
  std::string out = (dir / "f").string();
  ASSERT_EQ(run({"facts", dump, "--out", out}).code, cli::kExitOk);
  std::string cge = out + "/CallGraphEdge.csv";
  CliRun r = run({"recall", "--reference", cge, "--observed", cge, "--exact"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::size_t n = read_call_graph_edges(cge).size();
  EXPECT_EQ(r.out.rfind("recall " + std::to_string(n) + "/" + std::to_string(n) + " 1.000000", 0),
            0u);
}

TEST(Cli, ClassesWritesArchive) {
  testing::TempDir dir;
  std::string dump;
  for (int seed = 0;; ++seed) {
    if (random_program(seed).find_class(SynthProgram::kClassData)) {
      dump = synth(dir, seed);
      break;
    }
  }
  std::string jar = (dir / "classes.jar").string();
  CliRun r = run({"classes", dump, "--out", jar});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(jar));
  EXPECT_NE(r.out.find("classes "), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesOptions) {
  testing::TempDir dir;
  std::string dump = synth(dir, 3);
  std::string out = (dir / "cfg_out").string();
  fs::path cfg = dir / "run.toml";
  std::string toml = "[facts]\nsensitivity = \"type:1:1\"\nout = \"" + out + "\"\n";
  internal::write_file(cfg, toml);
  CliRun r = run({"facts", dump, "--config", cfg.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  auto m = nlohmann::json::parse(internal::read_text_file(fs::path(out) / "manifest.json"));
  EXPECT_EQ(m["config"]["sensitivity"], "type:1:1");
}

}  // namespace
}  // namespace heapfacts
