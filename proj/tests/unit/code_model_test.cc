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

#include "heapfacts/code_model.h"

#include <gtest/gtest.h>

#include "file_io.h"
#include "heapfacts/errors.h"
#include "heapfacts/zip_archive.h"
#include "support/site_listing.h"
#include "support/test_util.h"

namespace heapfacts {
namespace {

using testing::fixture;

TEST(CodeModel, ClassDirectoryMatchesDisassemblerListing) {
  CodeModel code = scan_inputs({fixture("classes")});
  EXPECT_TRUE(code.warnings.empty());
  EXPECT_EQ(code.source, CodeSource::kClassfileScan);
  EXPECT_EQ(testing::site_listing(code),
            testing::expected_listing(fixture("classes/expected_sites.tsv")));
}

TEST(CodeModel, LineTablesAndSuperclasses) {
  CodeModel code = scan_inputs({fixture("classes/fx/Wide.class")});
  ASSERT_EQ(code.classes_seen.size(), 1u);
  const MethodMeta* w = code.find("fx.Wide", "w", "()Ljava/lang/Object;");
  ASSERT_NE(w, nullptr);
  EXPECT_TRUE(w->is_static);
  EXPECT_FALSE(w->line_table.empty());
  EXPECT_EQ(code.find(w->signature_id), w);
  EXPECT_EQ(code.superclasses.at("fx.Wide"), "java.lang.Object");
}

TEST(CodeModel, JarEntriesAreScanned) {
  CodeModel code = scan_inputs({fixture("archives/two.jar")});
  EXPECT_TRUE(code.warnings.empty());
  EXPECT_EQ(code.classes_seen, (std::set<std::string>{"fx.Arrays", "fx.Simple"}));
}

TEST(CodeModel, DuplicateClassKeepsFirstWithWarning) {
  CodeModel code = scan_inputs({fixture("classes"), fixture("archives/two.jar")});
  EXPECT_EQ(code.warnings.size(), 2u);
  EXPECT_EQ(testing::site_listing(code),
            testing::expected_listing(fixture("classes/expected_sites.tsv")));
}

TEST(CodeModel, MissingAndJunkInputsWarn) {
  testing::TempDir dir;
  internal::write_file(dir / "junk.class", std::string_view("not a class"));
  CodeModel code = scan_inputs({dir / "junk.class", dir / "absent.jar"});
  EXPECT_EQ(code.warnings.size(), 2u);
  EXPECT_TRUE(code.methods.empty());
}

TEST(CodeModel, MalformedClassThrows) {
  std::vector<std::uint8_t> bytes{0xCA, 0xFE, 0xBA, 0xBE, 0, 0};
  EXPECT_THROW(parse_class(bytes), MalformedClassFile);
  std::vector<std::uint8_t> wrong_magic{1, 2, 3, 4, 0, 0, 0, 50};
  EXPECT_THROW(parse_class(wrong_magic), MalformedClassFile);
}

TEST(CodeModel, InstructionOffsetsHandleSwitchPadding) {
  // iconst_0; tableswitch (pad 2) default, low 0, high 1, 2 offsets; return
  std::vector<std::uint8_t> code{0x03, 0xAA, 0, 0};
  for (std::uint32_t v : {20u, 0u, 1u, 20u, 20u}) {
    for (int s = 24; s >= 0; s -= 8) code.push_back(static_cast<std::uint8_t>(v >> s));
  }
  code.push_back(0xB1);
  EXPECT_EQ(instruction_offsets(code), (std::vector<std::uint32_t>{0, 1, 24}));
  // wide iinc is 6 bytes.
  std::vector<std::uint8_t> wide{0xC4, 0x84, 0, 1, 0, 5, 0xB1};
  EXPECT_EQ(instruction_offsets(wide), (std::vector<std::uint32_t>{0, 6}));
  std::vector<std::uint8_t> cut{0x11, 0x00};
  EXPECT_THROW(instruction_offsets(cut), MalformedClassFile);
}

TEST(CodeModel, SiteMapParses) {
  CodeModel code = load_site_map(
      "# comment\n"
      "<a.M: void run()>\tjava.lang.Object\t5\t0\n"
      "\n"
      "<a.M: void run()>\tint[]\t-\t0\r\n"
      "<a.M: void run()>\tjava.lang.Object\t9\t1\n");
  EXPECT_EQ(code.source, CodeSource::kSiteMap);
  const MethodMeta* m = code.find("<a.M: void run()>");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->declaring_class, "a.M");
  EXPECT_EQ(m->descriptor, "()V");
  ASSERT_EQ(m->alloc_instructions.size(), 3u);
  EXPECT_EQ(m->alloc_instructions[1].bytecode_index, 1u);
  EXPECT_EQ(m->alloc_instructions[1].allocated_type, "int[]");
  EXPECT_FALSE(m->alloc_instructions[1].line.has_value());
  EXPECT_EQ(m->alloc_instructions[2].site_index, 1u);
}

std::size_t site_map_error_line(std::string_view text) {
  try {
    load_site_map(text);
  } catch (const SiteMapSyntax& e) {
    return e.line();
  }
  return 0;
}

TEST(CodeModel, SiteMapErrorsNameTheLine) {
  EXPECT_EQ(site_map_error_line("<a.M: void run()>\tX\t5\n"), 1u);
  EXPECT_EQ(site_map_error_line("#\n<a.M: void run()>\tX\t0\t0\n"), 2u);
  EXPECT_EQ(site_map_error_line("a.M.run\tX\t1\t0\n"), 1u);
  EXPECT_EQ(site_map_error_line("<a.M: void run()>\tX\tseven\t0\n"), 1u);
  EXPECT_EQ(site_map_error_line("<a.M: void run()>\tX\t1\tz\n"), 1u);
  EXPECT_EQ(site_map_error_line("<a.M: void run()>\tX\t1\t0\n\n<a.M: void run()>\tX\t2\t0\n"),
            3u);
  EXPECT_EQ(site_map_error_line("<a.M: void run()>\tX\t1\t0\n"), 0u);
}

TEST(CodeModel, MergePrefersPrimary) {
  CodeModel a = load_site_map("<a.M: void run()>\tX\t5\t0\n");
  CodeModel b = load_site_map("<a.M: void run()>\tY\t6\t0\n<a.N: void go()>\tZ\t1\t0\n");
  CodeModel m = merge_code_models(a, b);
  EXPECT_EQ(m.methods.size(), 2u);
  EXPECT_EQ(m.find("<a.M: void run()>")->alloc_instructions[0].allocated_type, "X");
  EXPECT_EQ(m.warnings.size(), 1u);
  EXPECT_EQ(m.source, CodeSource::kMerged);
  EXPECT_EQ(merge_code_models(CodeModel{}, b).source, CodeSource::kSiteMap);
}

TEST(ZipArchive, WriteReadRoundTripIsDeterministic) {
  std::vector<ZipEntry> entries{{"b/B.class", {1, 2, 3}}, {"a/A.class", {}}, {"c", {9}}};
  auto bytes = write_zip(entries);
  EXPECT_EQ(bytes, write_zip({entries[2], entries[0], entries[1]}));
  std::vector<std::string> warnings;
  auto back = read_zip(bytes, &warnings);
  EXPECT_TRUE(warnings.empty());
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].path, "a/A.class");
  EXPECT_EQ(back[1], entries[0]);
}

TEST(ZipArchive, DeflatedJarEntries) {
  std::vector<std::string> warnings;
  auto entries = read_zip(internal::read_file(fixture("archives/two.jar")), &warnings);
  EXPECT_TRUE(warnings.empty());
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[1].path, "fx/Simple.class");
  EXPECT_EQ(entries[1].data, internal::read_file(fixture("classes/fx/Simple.class")));
}

TEST(ZipArchive, CorruptEntryIsSkipped) {
  auto bytes = write_zip({{"x.bin", {1, 2, 3, 4}}});
  // Flip a payload byte; the stored CRC no longer matches.
  bytes[30 + 5] ^= 0xFF;
  std::vector<std::string> warnings;
  EXPECT_TRUE(read_zip(bytes, &warnings).empty());
  EXPECT_EQ(warnings.size(), 1u);
  std::vector<std::uint8_t> junk{1, 2, 3};
  EXPECT_THROW(read_zip(junk, &warnings), IoError);
}

}  // namespace
}  // namespace heapfacts
