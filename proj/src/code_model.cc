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

#include <algorithm>
#include <charconv>
#include <tuple>

#include "file_io.h"
#include "heapfacts/errors.h"
#include "heapfacts/jvm_names.h"
#include "heapfacts/zip_archive.h"

namespace heapfacts {
namespace {

namespace fs = std::filesystem;

bool has_magic(std::span<const std::uint8_t> b, std::uint8_t a0, std::uint8_t a1,
               std::uint8_t a2, std::uint8_t a3) {
  return b.size() >= 4 && b[0] == a0 && b[1] == a1 && b[2] == a2 && b[3] == a3;
}

bool is_class_bytes(std::span<const std::uint8_t> b) {
  return has_magic(b, 0xCA, 0xFE, 0xBA, 0xBE);
}

bool is_zip_bytes(std::span<const std::uint8_t> b) {
  return has_magic(b, 'P', 'K', 0x03, 0x04) || has_magic(b, 'P', 'K', 0x05, 0x06);
}

void add_class_bytes(CodeModel& model, std::span<const std::uint8_t> bytes,
                     const std::string& origin) {
  try {
    model.add_class(parse_class(bytes), origin);
  } catch (const MalformedClassFile& e) {
    model.warnings.push_back(origin + ": " + e.what());
  }
}

void add_archive(CodeModel& model, std::span<const std::uint8_t> bytes,
                 const std::string& origin) {
  std::vector<std::string> zip_warnings;
  std::vector<ZipEntry> entries;
  try {
    entries = read_zip(bytes, &zip_warnings);
  } catch (const IoError& e) {
    model.warnings.push_back(origin + ": " + e.what());
    return;
  }
  for (auto& w : zip_warnings) model.warnings.push_back(origin + ": " + w);
  std::sort(entries.begin(), entries.end(),
            [](const ZipEntry& a, const ZipEntry& b) { return a.path < b.path; });
  for (const auto& e : entries) {
    if (!e.path.ends_with(".class")) continue;
    add_class_bytes(model, e.data, origin + "!" + e.path);
  }
}

void add_file(CodeModel& model, const fs::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = internal::read_file(path);
  } catch (const IoError& e) {
    model.warnings.push_back(e.what());
    return;
  }
  if (is_class_bytes(bytes)) {
    add_class_bytes(model, bytes, path.string());
  } else if (is_zip_bytes(bytes)) {
    add_archive(model, bytes, path.string());
  } else if (path.extension() == ".class") {
    model.warnings.push_back(path.string() + ": bad class file magic");
  }
}

std::optional<std::uint32_t> parse_uint(std::string_view s) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

const MethodMeta* CodeModel::find(std::string_view signature_id) const {
  auto it = methods.find(std::string(signature_id));
  return it == methods.end() ? nullptr : &it->second;
}

const MethodMeta* CodeModel::find(std::string_view declaring_class,
                                  std::string_view name,
                                  std::string_view descriptor) const {
  auto sig = signature_id(declaring_class, name, descriptor);
  return sig ? find(*sig) : nullptr;
}

bool CodeModel::add_class(ClassFileInfo cls, std::string_view origin) {
  if (!classes_seen.insert(cls.name).second) {
    warnings.push_back("duplicate class " + cls.name + " in " +
                       std::string(origin) + "; keeping the first definition");
    return false;
  }
  if (cls.super_name) superclasses[cls.name] = *cls.super_name;
  for (auto& m : cls.methods) {
    std::string key = m.signature_id;
    methods.emplace(std::move(key), std::move(m));
  }
  if (source == CodeSource::kEmpty) {
    source = CodeSource::kClassfileScan;
  } else if (source != CodeSource::kClassfileScan) {
    source = CodeSource::kMerged;
  }
  return true;
}

CodeModel scan_inputs(const std::vector<fs::path>& paths) {
  CodeModel model;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> files;
      for (auto it = fs::recursive_directory_iterator(p, ec);
           !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (it->is_regular_file(ec)) files.push_back(it->path());
      }
      if (ec) model.warnings.push_back(p.string() + ": " + ec.message());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        auto ext = f.extension();
        if (ext == ".class" || ext == ".jar" || ext == ".zip") add_file(model, f);
      }
    } else if (fs::exists(p, ec)) {
      add_file(model, p);
    } else {
      model.warnings.push_back(p.string() + ": no such file or directory");
    }
  }
  return model;
}

CodeModel load_site_map(std::string_view text) {
  CodeModel model;
  model.source = CodeSource::kSiteMap;
  std::set<std::tuple<std::string, std::string, std::uint32_t>> keys;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    auto cols = split_tabs(line);
    if (cols.size() != 4) {
      throw SiteMapSyntax(line_no, "expected 4 tab-separated columns, got " +
                                       std::to_string(cols.size()));
    }
    auto parsed = parse_signature_id(cols[0]);
    if (!parsed) throw SiteMapSyntax(line_no, "bad signature id");
    auto desc = parsed->descriptor();
    if (!desc) throw SiteMapSyntax(line_no, "signature types have no descriptor");
    if (cols[1].empty()) throw SiteMapSyntax(line_no, "empty allocated type");
    std::optional<std::uint32_t> line_value;
    if (cols[2] != "-") {
      line_value = parse_uint(cols[2]);
      if (!line_value || *line_value == 0) {
        throw SiteMapSyntax(line_no, "line must be a positive integer or '-'");
      }
    }
    auto index = parse_uint(cols[3]);
    if (!index) throw SiteMapSyntax(line_no, "site index must be an integer");

    std::string sig(cols[0]);
    std::string type(cols[1]);
    if (!keys.emplace(sig, type, *index).second) {
      throw SiteMapSyntax(line_no, "duplicate site " + sig + " " + type + " #" +
                                       std::to_string(*index));
    }
    auto [it, fresh] = model.methods.try_emplace(sig);
    MethodMeta& m = it->second;
    if (fresh) {
      m.declaring_class = parsed->declaring_class;
      m.name = parsed->name;
      m.descriptor = *desc;
      m.signature_id = sig;
      model.classes_seen.insert(parsed->declaring_class);
    }
    AllocationInstr ai;
    ai.bytecode_index = static_cast<std::uint32_t>(m.alloc_instructions.size());
    ai.allocated_type = std::move(type);
    ai.line = line_value;
    ai.site_index = *index;
    m.alloc_instructions.push_back(std::move(ai));
  }
  return model;
}

CodeModel load_site_map_file(const fs::path& path) {
  return load_site_map(internal::read_text_file(path));
}

CodeModel merge_code_models(CodeModel primary, const CodeModel& secondary) {
  for (const auto& [sig, m] : secondary.methods) {
    if (primary.methods.contains(sig)) {
      primary.warnings.push_back("method " + sig +
                                 " defined twice; keeping the first definition");
      continue;
    }
    primary.methods.emplace(sig, m);
  }
  primary.classes_seen.insert(secondary.classes_seen.begin(),
                              secondary.classes_seen.end());
  for (const auto& [cls, sup] : secondary.superclasses) {
    primary.superclasses.try_emplace(cls, sup);
  }
  primary.warnings.insert(primary.warnings.end(), secondary.warnings.begin(),
                          secondary.warnings.end());
  if (primary.source == CodeSource::kEmpty) {
    primary.source = secondary.source;
  } else if (secondary.source != CodeSource::kEmpty) {
    primary.source = CodeSource::kMerged;
  }
  return primary;
}

}  // namespace heapfacts
