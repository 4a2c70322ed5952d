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

#ifndef HEAPFACTS_SRC_BYTE_IO_H_
#define HEAPFACTS_SRC_BYTE_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace heapfacts::internal {

// Thrown by ByteCursor when a read runs past the end of its span.
struct OutOfBounds {
  std::size_t offset;
};

// Bounds-checked cursor over a byte span. Big-endian unless the `le` variants
// are used (zip structures are little-endian).
class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::uint8_t> data, std::size_t base = 0)
      : data_(data), base_(base) {}

  std::size_t pos() const { return pos_; }
  // Position relative to the start of the enclosing buffer.
  std::size_t absolute() const { return base_ + pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }

  void seek(std::size_t pos) {
    if (pos > data_.size()) throw OutOfBounds{base_ + pos};
    pos_ = pos;
  }
  void skip(std::size_t n) { need(n); pos_ += n; }

  std::uint8_t u1() {
    need(1);
    return data_[pos_++];
  }
  std::uint16_t u2() { return static_cast<std::uint16_t>(be(2)); }
  std::uint32_t u4() { return static_cast<std::uint32_t>(be(4)); }
  std::uint64_t u8() { return be(8); }
  std::uint64_t id(std::uint32_t id_size) { return be(id_size); }

  std::uint16_t le2() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t le4() { return static_cast<std::uint32_t>(le(4)); }

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::vector<std::uint8_t> copy(std::size_t n) {
    auto s = bytes(n);
    return {s.begin(), s.end()};
  }
  std::string str(std::size_t n) {
    auto s = bytes(n);
    return {s.begin(), s.end()};
  }

 private:
  void need(std::size_t n) const {
    if (n > remaining()) throw OutOfBounds{base_ + data_.size()};
  }
  std::uint64_t be(std::size_t n) {
    need(n);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += n;
    return v;
  }
  std::uint64_t le(std::size_t n) {
    need(n);
    std::uint64_t v = 0;
    for (std::size_t i = n; i-- > 0;) v = (v << 8) | data_[pos_ + i];
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// Appends big-endian (or little-endian) values to a byte vector.
class ByteSink {
 public:
  std::vector<std::uint8_t>& buffer() { return buf_; }
  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  std::size_t size() const { return buf_.size(); }

  void u1(std::uint8_t v) { buf_.push_back(v); }
  void u2(std::uint16_t v) { be(v, 2); }
  void u4(std::uint32_t v) { be(v, 4); }
  void u8(std::uint64_t v) { be(v, 8); }
  void id(std::uint64_t v, std::uint32_t id_size) { be(v, id_size); }
  void le2(std::uint16_t v) { le(v, 2); }
  void le4(std::uint32_t v) { le(v, 4); }
  void bytes(std::span<const std::uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
  }
  void str(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  // Overwrites a previously written big-endian u4 (length back-patching).
  void patch_u4(std::size_t at, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) {
      buf_[at + i] = static_cast<std::uint8_t>(v);
      v >>= 8;
    }
  }

 private:
  void be(std::uint64_t v, std::size_t n) {
    for (std::size_t i = n; i-- > 0;) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void le(std::uint64_t v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  std::vector<std::uint8_t> buf_;
};

}  // namespace heapfacts::internal

#endif  // HEAPFACTS_SRC_BYTE_IO_H_
