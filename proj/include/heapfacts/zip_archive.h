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
// Minimal zip container support: reading stored and deflated entries from
// jar/zip inputs, and writing reproducible stored archives.

#ifndef HEAPFACTS_ZIP_ARCHIVE_H_
#define HEAPFACTS_ZIP_ARCHIVE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace heapfacts {

struct ZipEntry {
  std::string path;
  std::vector<std::uint8_t> data;
  bool operator==(const ZipEntry&) const = default;
};

// Entries in central-directory order; directories are omitted. Throws
// IoError when no end-of-central-directory record is found. Entries that
// cannot be extracted (unsupported method, CRC mismatch, bad offsets) are
// skipped with a warning.
std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes,
                               std::vector<std::string>* warnings);

// Stored (uncompressed) entries sorted by path, all stamped 1980-01-01
// 00:00, so equal inputs give equal bytes.
std::vector<std::uint8_t> write_zip(std::vector<ZipEntry> entries);

}  // namespace heapfacts

#endif  // HEAPFACTS_ZIP_ARCHIVE_H_
