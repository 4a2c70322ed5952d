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
// Reader for the HPROF 1.0.2 binary heap dump format.
//
// File layout (all values big-endian):
//
//   "JAVA PROFILE 1.0.2\0"  u4 id_size  u8 timestamp_ms
//   record*  where record = u1 tag, u4 time_delta, u4 length, body[length]
//
// The reader decodes the records needed to rebuild the heap graph (strings,
// class loads, frames, traces and heap dump sub-records). Other tags are kept
// as opaque byte spans. Corruption after the header never throws: the reader
// records a warning and returns what it decoded up to that point.

#ifndef HEAPFACTS_HPROF_READER_H_
#define HEAPFACTS_HPROF_READER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "heapfacts/jvm_names.h"

namespace heapfacts::hprof {

enum class Tag : std::uint8_t {
  kUtf8 = 0x01,
  kLoadClass = 0x02,
  kStackFrame = 0x04,
  kStackTrace = 0x05,
  kHeapDump = 0x0C,
  kHeapDumpSegment = 0x1C,
  kHeapDumpEnd = 0x2C,
};

enum class SubTag : std::uint8_t {
  kRootUnknown = 0xFF,
  kRootJniGlobal = 0x01,
  kRootJniLocal = 0x02,
  kRootJavaFrame = 0x03,
  kRootNativeStack = 0x04,
  kRootStickyClass = 0x05,
  kRootThreadBlock = 0x06,
  kRootMonitorUsed = 0x07,
  kRootThreadObject = 0x08,
  kClassDump = 0x20,
  kInstanceDump = 0x21,
  kObjectArrayDump = 0x22,
  kPrimitiveArrayDump = 0x23,
};

inline constexpr std::string_view kFormatPrefix = "JAVA PROFILE";
inline constexpr std::string_view kFormatName = "JAVA PROFILE 1.0.2";

struct DumpHeader {
  std::string format_name;
  std::uint32_t id_size = 8;
  std::uint64_t timestamp_ms = 0;

  bool operator==(const DumpHeader&) const = default;
};

struct Utf8String {
  ObjectId id = 0;
  std::string text;
  bool operator==(const Utf8String&) const = default;
};

struct LoadClass {
  std::uint32_t serial = 0;
  ObjectId class_obj_id = 0;
  std::uint32_t trace_serial = 0;
  ObjectId name_id = 0;
  bool operator==(const LoadClass&) const = default;
};

// `line` keeps the raw HPROF value: >0 line, 0 unavailable, <0 unknown,
// compiled or native. The heap model normalizes it.
struct StackFrame {
  ObjectId frame_id = 0;
  ObjectId method_name_id = 0;
  ObjectId method_sig_id = 0;
  ObjectId source_file_id = 0;
  std::uint32_t class_serial = 0;
  std::int32_t line = 0;
  bool operator==(const StackFrame&) const = default;
};

struct StackTrace {
  std::uint32_t trace_serial = 0;
  std::uint32_t thread_serial = 0;
  std::vector<ObjectId> frame_ids;
  bool operator==(const StackTrace&) const = default;
};

struct StaticField {
  ObjectId name_id = 0;
  BasicType type = BasicType::kObject;
  // Raw value bits, zero-extended.
  std::uint64_t value = 0;
  bool operator==(const StaticField&) const = default;
};

struct FieldDecl {
  ObjectId name_id = 0;
  BasicType type = BasicType::kObject;
  bool operator==(const FieldDecl&) const = default;
};

struct ClassDump {
  ObjectId class_obj_id = 0;
  std::uint32_t trace_serial = 0;
  ObjectId super_id = 0;
  ObjectId loader_id = 0;
  std::uint32_t instance_size = 0;
  std::vector<StaticField> static_fields;
  std::vector<FieldDecl> instance_fields;
  bool operator==(const ClassDump&) const = default;
};

struct InstanceDump {
  ObjectId obj_id = 0;
  std::uint32_t trace_serial = 0;
  ObjectId class_obj_id = 0;
  std::vector<std::uint8_t> field_bytes;
  bool operator==(const InstanceDump&) const = default;
};

struct ObjectArrayDump {
  ObjectId obj_id = 0;
  std::uint32_t trace_serial = 0;
  ObjectId array_class_id = 0;
  std::vector<ObjectId> elements;
  bool operator==(const ObjectArrayDump&) const = default;
};

// `data` holds count * element size raw big-endian bytes.
struct PrimitiveArrayDump {
  ObjectId obj_id = 0;
  std::uint32_t trace_serial = 0;
  BasicType element_type = BasicType::kByte;
  std::uint32_t count = 0;
  std::vector<std::uint8_t> data;
  bool operator==(const PrimitiveArrayDump&) const = default;
};

// Extra fields depend on the kind: thread serial for JNI local / java frame /
// native stack / thread block / thread object roots, frame number (or stack
// trace serial for thread objects) in `aux`, and the JNI global ref id.
struct GcRoot {
  SubTag kind = SubTag::kRootUnknown;
  ObjectId obj_id = 0;
  ObjectId jni_ref = 0;
  std::uint32_t thread_serial = 0;
  std::uint32_t aux = 0;
  bool operator==(const GcRoot&) const = default;
};

using HeapSubRecord = std::variant<ClassDump, InstanceDump, ObjectArrayDump,
                                   PrimitiveArrayDump, GcRoot>;

struct HeapDump {
  std::vector<HeapSubRecord> sub_records;
  bool operator==(const HeapDump&) const = default;
};

struct HeapDumpEnd {
  bool operator==(const HeapDumpEnd&) const = default;
};

struct OpaqueRecord {
  std::vector<std::uint8_t> body;
  bool operator==(const OpaqueRecord&) const = default;
};

using RecordBody = std::variant<Utf8String, LoadClass, StackFrame, StackTrace,
                                HeapDump, HeapDumpEnd, OpaqueRecord>;

struct RawRecord {
  std::uint8_t tag = 0;
  std::uint32_t time_delta = 0;
  // Byte offset of the record's tag in the input.
  std::uint64_t offset = 0;
  RecordBody body;

  bool operator==(const RawRecord&) const = default;
};

struct ParseWarning {
  std::uint64_t byte_offset = 0;
  std::string message;
  bool operator==(const ParseWarning&) const = default;
};

struct RawDump {
  DumpHeader header;
  std::map<ObjectId, std::string> strings;
  std::vector<RawRecord> records;
  std::vector<ParseWarning> warnings;

  // All heap sub-records, segments concatenated in file order.
  std::vector<const HeapSubRecord*> heap_sub_records() const;

  bool operator==(const RawDump&) const = default;
};

// Throws HeaderMalformed when the header is missing, truncated, lacks the
// "JAVA PROFILE" prefix or declares an id size other than 4 or 8.
RawDump parse_dump(std::span<const std::uint8_t> input);

// Reads the whole file and parses it. Throws IoError if unreadable.
RawDump parse_dump_file(const std::filesystem::path& path);

enum class RecordKind {
  kUtf8String,
  kLoadClass,
  kStackFrame,
  kStackTrace,
  kHeapDump,
  kHeapDumpSegment,
  kHeapDumpEnd,
  kOpaque,
};

std::string_view record_kind_name(RecordKind kind);
RecordKind record_kind(const RawRecord& record);

// Every kind is present in the result, zero when unseen.
std::map<RecordKind, std::size_t> record_stats(const RawDump& dump);

}  // namespace heapfacts::hprof

#endif  // HEAPFACTS_HPROF_READER_H_
