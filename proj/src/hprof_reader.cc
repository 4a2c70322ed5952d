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

#include "heapfacts/hprof_reader.h"

#include <algorithm>
#include <sstream>

#include "byte_io.h"
#include "file_io.h"
#include "heapfacts/errors.h"

namespace heapfacts::hprof {
namespace {

using internal::ByteCursor;
using internal::OutOfBounds;

constexpr std::size_t kRecordHeaderSize = 9;

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

// Thrown for structurally invalid sub-records whose length cannot be
// determined (unknown sub-tag, bad basic type).
struct BadSubRecord {
  std::size_t offset;
  std::string message;
};

BasicType read_type(ByteCursor& c) {
  std::size_t at = c.absolute();
  std::uint8_t code = c.u1();
  auto t = basic_type_from_code(code);
  if (!t) {
    throw BadSubRecord{at, "invalid basic type " + std::to_string(code)};
  }
  return *t;
}

ClassDump read_class_dump(ByteCursor& c, std::uint32_t id_size) {
  ClassDump d;
  d.class_obj_id = c.id(id_size);
  d.trace_serial = c.u4();
  d.super_id = c.id(id_size);
  d.loader_id = c.id(id_size);
  c.skip(4 * id_size);  // signers, protection domain, 2 reserved
  d.instance_size = c.u4();
  std::uint16_t pool = c.u2();
  for (std::uint16_t i = 0; i < pool; ++i) {
    c.u2();
    BasicType t = read_type(c);
    c.skip(basic_type_size(t, id_size));
  }
  std::uint16_t statics = c.u2();
  d.static_fields.reserve(statics);
  for (std::uint16_t i = 0; i < statics; ++i) {
    StaticField f;
    f.name_id = c.id(id_size);
    f.type = read_type(c);
    std::size_t n = basic_type_size(f.type, id_size);
    f.value = n == 8 ? c.u8() : c.id(static_cast<std::uint32_t>(n));
    d.static_fields.push_back(f);
  }
  std::uint16_t fields = c.u2();
  d.instance_fields.reserve(fields);
  for (std::uint16_t i = 0; i < fields; ++i) {
    FieldDecl f;
    f.name_id = c.id(id_size);
    f.type = read_type(c);
    d.instance_fields.push_back(f);
  }
  return d;
}

HeapSubRecord read_sub_record(ByteCursor& c, std::uint32_t id_size) {
  std::size_t at = c.absolute();
  auto tag = static_cast<SubTag>(c.u1());
  switch (tag) {
    case SubTag::kRootUnknown:
    case SubTag::kRootStickyClass:
    case SubTag::kRootMonitorUsed: {
      GcRoot r{tag};
      r.obj_id = c.id(id_size);
      return r;
    }
    case SubTag::kRootJniGlobal: {
      GcRoot r{tag};
      r.obj_id = c.id(id_size);
      r.jni_ref = c.id(id_size);
      return r;
    }
    case SubTag::kRootJniLocal:
    case SubTag::kRootJavaFrame:
    case SubTag::kRootThreadObject: {
      GcRoot r{tag};
      r.obj_id = c.id(id_size);
      r.thread_serial = c.u4();
      r.aux = c.u4();
      return r;
    }
    case SubTag::kRootNativeStack:
    case SubTag::kRootThreadBlock: {
      GcRoot r{tag};
      r.obj_id = c.id(id_size);
      r.thread_serial = c.u4();
      return r;
    }
    case SubTag::kClassDump:
      return read_class_dump(c, id_size);
    case SubTag::kInstanceDump: {
      InstanceDump d;
      d.obj_id = c.id(id_size);
      d.trace_serial = c.u4();
      d.class_obj_id = c.id(id_size);
      d.field_bytes = c.copy(c.u4());
      return d;
    }
    case SubTag::kObjectArrayDump: {
      ObjectArrayDump d;
      d.obj_id = c.id(id_size);
      d.trace_serial = c.u4();
      std::uint32_t n = c.u4();
      d.array_class_id = c.id(id_size);
      if (static_cast<std::uint64_t>(n) * id_size > c.remaining()) {
        throw OutOfBounds{c.absolute() + c.remaining()};
      }
      d.elements.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) d.elements.push_back(c.id(id_size));
      return d;
    }
    case SubTag::kPrimitiveArrayDump: {
      PrimitiveArrayDump d;
      d.obj_id = c.id(id_size);
      d.trace_serial = c.u4();
      d.count = c.u4();
      std::size_t type_at = c.absolute();
      d.element_type = read_type(c);
      if (d.element_type == BasicType::kObject) {
        throw BadSubRecord{type_at, "primitive array of object type"};
      }
      std::uint64_t n = static_cast<std::uint64_t>(d.count) *
                        basic_type_size(d.element_type, id_size);
      if (n > c.remaining()) throw OutOfBounds{c.absolute() + c.remaining()};
      d.data = c.copy(static_cast<std::size_t>(n));
      return d;
    }
  }
  std::ostringstream os;
  os << "unknown heap sub-record tag 0x" << std::hex
     << static_cast<int>(static_cast<std::uint8_t>(tag));
  throw BadSubRecord{at, os.str()};
}

// Decodes sub-records until the body is exhausted. A body cut short by file
// truncation (`partial`) drops its last incomplete sub-record silently; the
// caller already reports the truncation.
HeapDump read_heap_dump(ByteCursor& c, std::uint32_t id_size, bool partial,
                        std::vector<ParseWarning>& warnings) {
  HeapDump out;
  while (!c.at_end()) {
    std::size_t start = c.pos();
    try {
      out.sub_records.push_back(read_sub_record(c, id_size));
    } catch (const OutOfBounds&) {
      if (!partial) {
        warnings.push_back({c.absolute() - (c.pos() - start),
                            "heap sub-record overruns its record"});
      }
      c.skip(c.remaining());
      break;
    } catch (const BadSubRecord& e) {
      warnings.push_back({e.offset, e.message + "; skipping rest of record"});
      c.skip(c.remaining());
      break;
    }
  }
  return out;
}

RecordBody read_body(std::uint8_t tag, ByteCursor& c, std::uint32_t id_size,
                     std::vector<ParseWarning>& warnings) {
  switch (static_cast<Tag>(tag)) {
    case Tag::kUtf8: {
      Utf8String s;
      s.id = c.id(id_size);
      s.text = c.str(c.remaining());
      return s;
    }
    case Tag::kLoadClass: {
      LoadClass l;
      l.serial = c.u4();
      l.class_obj_id = c.id(id_size);
      l.trace_serial = c.u4();
      l.name_id = c.id(id_size);
      return l;
    }
    case Tag::kStackFrame: {
      StackFrame f;
      f.frame_id = c.id(id_size);
      f.method_name_id = c.id(id_size);
      f.method_sig_id = c.id(id_size);
      f.source_file_id = c.id(id_size);
      f.class_serial = c.u4();
      f.line = static_cast<std::int32_t>(c.u4());
      return f;
    }
    case Tag::kStackTrace: {
      StackTrace t;
      t.trace_serial = c.u4();
      t.thread_serial = c.u4();
      std::uint32_t n = c.u4();
      if (static_cast<std::uint64_t>(n) * id_size > c.remaining()) {
        throw OutOfBounds{c.absolute() + c.remaining()};
      }
      t.frame_ids.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) t.frame_ids.push_back(c.id(id_size));
      return t;
    }
    case Tag::kHeapDump:
    case Tag::kHeapDumpSegment:
      return read_heap_dump(c, id_size, false, warnings);
    case Tag::kHeapDumpEnd:
      return HeapDumpEnd{};
  }
  return OpaqueRecord{c.copy(c.remaining())};
}

DumpHeader read_header(std::span<const std::uint8_t> input,
                       std::size_t* header_size) {
  auto nul = std::find(input.begin(), input.end(), std::uint8_t{0});
  if (nul == input.end()) {
    throw HeaderMalformed("no NUL-terminated format name");
  }
  DumpHeader h;
  h.format_name.assign(input.begin(), nul);
  if (!h.format_name.starts_with(kFormatPrefix)) {
    throw HeaderMalformed("format name does not start with \"JAVA PROFILE\"");
  }
  std::size_t name_len = static_cast<std::size_t>(nul - input.begin()) + 1;
  ByteCursor c(input.subspan(name_len), name_len);
  try {
    h.id_size = c.u4();
    h.timestamp_ms = c.u8();
  } catch (const OutOfBounds&) {
    throw HeaderMalformed("truncated header");
  }
  if (h.id_size != 4 && h.id_size != 8) {
    throw HeaderMalformed("unsupported identifier size " +
                          std::to_string(h.id_size));
  }
  *header_size = name_len + 12;
  return h;
}

std::string_view tag_name(std::uint8_t tag) {
  switch (static_cast<Tag>(tag)) {
    case Tag::kUtf8: return "UTF8";
    case Tag::kLoadClass: return "LOAD CLASS";
    case Tag::kStackFrame: return "STACK FRAME";
    case Tag::kStackTrace: return "STACK TRACE";
    case Tag::kHeapDump: return "HEAP DUMP";
    case Tag::kHeapDumpSegment: return "HEAP DUMP SEGMENT";
    case Tag::kHeapDumpEnd: return "HEAP DUMP END";
  }
  return "unknown";
}

}  // namespace

std::vector<const HeapSubRecord*> RawDump::heap_sub_records() const {
  std::vector<const HeapSubRecord*> out;
  for (const auto& r : records) {
    if (const auto* h = std::get_if<HeapDump>(&r.body)) {
      for (const auto& s : h->sub_records) out.push_back(&s);
    }
  }
  return out;
}

RawDump parse_dump(std::span<const std::uint8_t> input) {
  RawDump dump;
  std::size_t pos = 0;
  dump.header = read_header(input, &pos);
  const std::uint32_t id_size = dump.header.id_size;

  bool truncated = false;
  bool saw_heap = false;
  bool segment_open = false;
  while (pos < input.size()) {
    const std::size_t rec_off = pos;
    if (input.size() - pos < kRecordHeaderSize) {
      dump.warnings.push_back({rec_off, "truncated record header"});
      truncated = true;
      break;
    }
    ByteCursor head(input.subspan(pos, kRecordHeaderSize), pos);
    RawRecord rec;
    rec.tag = head.u1();
    rec.time_delta = head.u4();
    rec.offset = rec_off;
    const std::uint32_t length = head.u4();
    const std::size_t body_at = pos + kRecordHeaderSize;
    const std::size_t available = input.size() - body_at;

    const auto tag = static_cast<Tag>(rec.tag);
    const bool is_heap = tag == Tag::kHeapDump || tag == Tag::kHeapDumpSegment;
    if (length > available) {
      if (is_heap) {
        ByteCursor c(input.subspan(body_at, available), body_at);
        rec.body = read_heap_dump(c, id_size, true, dump.warnings);
        dump.records.push_back(std::move(rec));
      }
      dump.warnings.push_back(
          {rec_off, std::string(tag_name(rec.tag)) + " record truncated: " +
                        std::to_string(length) + " bytes declared, " +
                        std::to_string(available) + " available"});
      truncated = true;
      break;
    }

    ByteCursor c(input.subspan(body_at, length), body_at);
    try {
      rec.body = read_body(rec.tag, c, id_size, dump.warnings);
      if (!c.at_end()) {
        dump.warnings.push_back(
            {rec_off, std::string(tag_name(rec.tag)) + " record has " +
                          std::to_string(c.remaining()) + " trailing bytes"});
      }
      if (const auto* s = std::get_if<Utf8String>(&rec.body)) {
        dump.strings[s->id] = s->text;
      }
      if (is_heap || tag == Tag::kHeapDumpEnd) saw_heap = true;
      if (tag == Tag::kHeapDumpSegment) segment_open = true;
      if (tag == Tag::kHeapDumpEnd) segment_open = false;
      dump.records.push_back(std::move(rec));
    } catch (const OutOfBounds&) {
      dump.warnings.push_back(
          {rec_off, std::string(tag_name(rec.tag)) + " record at " +
                        hex(rec_off) + " is shorter than its fields; skipped"});
    }
    pos = body_at + length;
  }

  if (!truncated) {
    if (!dump.records.empty() && !saw_heap) {
      dump.warnings.push_back(
          {input.size(), "dump ends before any heap dump data (truncated?)"});
    } else if (segment_open) {
      dump.warnings.push_back(
          {input.size(), "heap dump segments not terminated by HEAP DUMP END"});
    }
  }
  return dump;
}

RawDump parse_dump_file(const std::filesystem::path& path) {
  return parse_dump(internal::read_file(path));
}

std::string_view record_kind_name(RecordKind kind) {
  switch (kind) {
    case RecordKind::kUtf8String: return "Utf8String";
    case RecordKind::kLoadClass: return "LoadClass";
    case RecordKind::kStackFrame: return "StackFrame";
    case RecordKind::kStackTrace: return "StackTrace";
    case RecordKind::kHeapDump: return "HeapDump";
    case RecordKind::kHeapDumpSegment: return "HeapDumpSegment";
    case RecordKind::kHeapDumpEnd: return "HeapDumpEnd";
    case RecordKind::kOpaque: return "Opaque";
  }
  return "?";
}

RecordKind record_kind(const RawRecord& record) {
  switch (static_cast<Tag>(record.tag)) {
    case Tag::kUtf8: return RecordKind::kUtf8String;
    case Tag::kLoadClass: return RecordKind::kLoadClass;
    case Tag::kStackFrame: return RecordKind::kStackFrame;
    case Tag::kStackTrace: return RecordKind::kStackTrace;
    case Tag::kHeapDump: return RecordKind::kHeapDump;
    case Tag::kHeapDumpSegment: return RecordKind::kHeapDumpSegment;
    case Tag::kHeapDumpEnd: return RecordKind::kHeapDumpEnd;
  }
  return RecordKind::kOpaque;
}

std::map<RecordKind, std::size_t> record_stats(const RawDump& dump) {
  std::map<RecordKind, std::size_t> out;
  for (auto k : {RecordKind::kUtf8String, RecordKind::kLoadClass,
                 RecordKind::kStackFrame, RecordKind::kStackTrace,
                 RecordKind::kHeapDump, RecordKind::kHeapDumpSegment,
                 RecordKind::kHeapDumpEnd, RecordKind::kOpaque}) {
    out[k] = 0;
  }
  for (const auto& r : dump.records) ++out[record_kind(r)];
  return out;
}

}  // namespace heapfacts::hprof
