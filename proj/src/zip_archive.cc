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

#include "heapfacts/zip_archive.h"

#include <zlib.h>

#include <algorithm>

#include "byte_io.h"
#include "heapfacts/errors.h"

namespace heapfacts {
namespace {

using internal::ByteCursor;
using internal::ByteSink;
using internal::OutOfBounds;

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::size_t kEndSize = 22;
constexpr std::uint16_t kDosDate1980 = (0 << 9) | (1 << 5) | 1;

std::uint32_t crc_of(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(
      crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

bool inflate_raw(std::span<const std::uint8_t> in, std::size_t expected,
                 std::vector<std::uint8_t>& out) {
  out.assign(expected, 0);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) return false;
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  bool ok = rc == Z_STREAM_END && zs.total_out == expected;
  inflateEnd(&zs);
  return ok;
}

std::size_t find_end_record(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEndSize) throw IoError("not a zip archive: too short");
  std::size_t lowest = bytes.size() > kEndSize + 0xFFFF
                           ? bytes.size() - kEndSize - 0xFFFF
                           : 0;
  for (std::size_t at = bytes.size() - kEndSize + 1; at-- > lowest;) {
    if (bytes[at] == 0x50 && bytes[at + 1] == 0x4b && bytes[at + 2] == 0x05 &&
        bytes[at + 3] == 0x06) {
      return at;
    }
  }
  throw IoError("not a zip archive: no end of central directory");
}

}  // namespace

std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes,
                               std::vector<std::string>* warnings) {
  auto warn = [warnings](std::string m) {
    if (warnings) warnings->push_back(std::move(m));
  };
  std::size_t end_at = find_end_record(bytes);
  std::vector<ZipEntry> out;
  try {
    ByteCursor end(bytes.subspan(end_at), end_at);
    end.skip(4 + 2 + 2 + 2);
    std::uint16_t count = end.le2();
    end.skip(4);
    std::uint32_t dir_offset = end.le4();

    ByteCursor dir(bytes);
    dir.seek(dir_offset);
    for (std::uint16_t i = 0; i < count; ++i) {
      if (dir.le4() != kCentralSig) {
        warn("zip central directory is corrupt at entry " + std::to_string(i));
        break;
      }
      dir.skip(2 + 2 + 2);
      std::uint16_t method = dir.le2();
      dir.skip(4);
      std::uint32_t crc = dir.le4();
      std::uint32_t csize = dir.le4();
      std::uint32_t usize = dir.le4();
      std::uint16_t name_len = dir.le2();
      std::uint16_t extra_len = dir.le2();
      std::uint16_t comment_len = dir.le2();
      dir.skip(2 + 2 + 4);
      std::uint32_t local = dir.le4();
      std::string name = dir.str(name_len);
      dir.skip(extra_len + comment_len);
      if (name.ends_with("/")) continue;

      try {
        ByteCursor lh(bytes);
        lh.seek(local);
        if (lh.le4() != kLocalSig) {
          warn("zip entry " + name + ": bad local header");
          continue;
        }
        lh.skip(22);
        std::uint16_t lname = lh.le2();
        std::uint16_t lextra = lh.le2();
        lh.skip(lname + lextra);
        auto raw = lh.bytes(csize);
        ZipEntry e{name, {}};
        if (method == 0) {
          e.data.assign(raw.begin(), raw.end());
        } else if (method == 8) {
          if (!inflate_raw(raw, usize, e.data)) {
            warn("zip entry " + name + ": inflate failed");
            continue;
          }
        } else {
          warn("zip entry " + name + ": unsupported compression method " +
               std::to_string(method));
          continue;
        }
        if (crc_of(e.data) != crc) {
          warn("zip entry " + name + ": CRC mismatch");
          continue;
        }
        out.push_back(std::move(e));
      } catch (const OutOfBounds&) {
        warn("zip entry " + name + ": data runs past the end of the archive");
      }
    }
  } catch (const OutOfBounds&) {
    warn("zip central directory is truncated");
  }
  return out;
}

std::vector<std::uint8_t> write_zip(std::vector<ZipEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const ZipEntry& a, const ZipEntry& b) { return a.path < b.path; });
  ByteSink out;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> crcs;
  for (const auto& e : entries) {
    offsets.push_back(static_cast<std::uint32_t>(out.size()));
    crcs.push_back(crc_of(e.data));
    out.le4(kLocalSig);
    out.le2(10);  // version needed
    out.le2(0);   // flags
    out.le2(0);   // stored
    out.le2(0);   // time
    out.le2(kDosDate1980);
    out.le4(crcs.back());
    out.le4(static_cast<std::uint32_t>(e.data.size()));
    out.le4(static_cast<std::uint32_t>(e.data.size()));
    out.le2(static_cast<std::uint16_t>(e.path.size()));
    out.le2(0);
    out.str(e.path);
    out.bytes(e.data);
  }
  auto dir_start = static_cast<std::uint32_t>(out.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    out.le4(kCentralSig);
    out.le2(20);  // version made by
    out.le2(10);
    out.le2(0);
    out.le2(0);
    out.le2(0);
    out.le2(kDosDate1980);
    out.le4(crcs[i]);
    out.le4(static_cast<std::uint32_t>(e.data.size()));
    out.le4(static_cast<std::uint32_t>(e.data.size()));
    out.le2(static_cast<std::uint16_t>(e.path.size()));
    out.le2(0);
    out.le2(0);
    out.le2(0);
    out.le2(0);
    out.le4(0);
    out.le4(offsets[i]);
    out.str(e.path);
  }
  auto dir_size = static_cast<std::uint32_t>(out.size()) - dir_start;
  out.le4(kEndSig);
  out.le2(0);
  out.le2(0);
  out.le2(static_cast<std::uint16_t>(entries.size()));
  out.le2(static_cast<std::uint16_t>(entries.size()));
  out.le4(dir_size);
  out.le4(dir_start);
  out.le2(0);
  return std::move(out.buffer());
}

}  // namespace heapfacts
