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

#include <algorithm>
#include <array>
#include <map>

#include "byte_io.h"
#include "heapfacts/code_model.h"
#include "heapfacts/errors.h"
#include "heapfacts/heap_model.h"
#include "heapfacts/jvm_names.h"

namespace heapfacts {
namespace {

using internal::ByteCursor;
using internal::OutOfBounds;

constexpr std::uint32_t kMagic = 0xCAFEBABE;
constexpr std::uint16_t kAccStatic = 0x0008;
constexpr std::uint16_t kAccInterface = 0x0200;

enum : std::uint8_t {
  kOpTableSwitch = 0xAA,
  kOpLookupSwitch = 0xAB,
  kOpNew = 0xBB,
  kOpNewArray = 0xBC,
  kOpANewArray = 0xBD,
  kOpWide = 0xC4,
  kOpMultiANewArray = 0xC5,
  kOpIinc = 0x84,
};

// Instruction length including the opcode, 0 for variable-length or
// undefined opcodes.
constexpr std::array<std::uint8_t, 256> make_lengths() {
  std::array<std::uint8_t, 256> t{};
  for (int op = 0x00; op <= 0xC9; ++op) t[op] = 1;
  t[0x10] = 2;  // bipush
  t[0x11] = 3;  // sipush
  t[0x12] = 2;  // ldc
  t[0x13] = 3;  // ldc_w
  t[0x14] = 3;  // ldc2_w
  for (int op = 0x15; op <= 0x19; ++op) t[op] = 2;  // loads
  for (int op = 0x36; op <= 0x3A; ++op) t[op] = 2;  // stores
  t[0x84] = 3;  // iinc
  for (int op = 0x99; op <= 0xA8; ++op) t[op] = 3;  // branches, goto, jsr
  t[0xA9] = 2;  // ret
  t[kOpTableSwitch] = 0;
  t[kOpLookupSwitch] = 0;
  for (int op = 0xB2; op <= 0xB8; ++op) t[op] = 3;  // field access, invokes
  t[0xB9] = 5;  // invokeinterface
  t[0xBA] = 5;  // invokedynamic
  t[kOpNew] = 3;
  t[kOpNewArray] = 2;
  t[kOpANewArray] = 3;
  t[0xC0] = 3;  // checkcast
  t[0xC1] = 3;  // instanceof
  t[kOpWide] = 0;
  t[kOpMultiANewArray] = 4;
  t[0xC6] = 3;  // ifnull
  t[0xC7] = 3;  // ifnonnull
  t[0xC8] = 5;  // goto_w
  t[0xC9] = 5;  // jsr_w
  return t;
}

constexpr auto kLengths = make_lengths();

std::string modified_utf8(std::span<const std::uint8_t> b) {
  std::vector<std::uint16_t> units;
  units.reserve(b.size());
  for (std::size_t i = 0; i < b.size();) {
    std::uint8_t c = b[i];
    if (c < 0x80) {
      units.push_back(c);
      i += 1;
    } else if ((c & 0xE0) == 0xC0 && i + 1 < b.size()) {
      units.push_back(static_cast<std::uint16_t>(((c & 0x1F) << 6) | (b[i + 1] & 0x3F)));
      i += 2;
    } else if ((c & 0xF0) == 0xE0 && i + 2 < b.size()) {
      units.push_back(static_cast<std::uint16_t>(((c & 0x0F) << 12) |
                                                 ((b[i + 1] & 0x3F) << 6) |
                                                 (b[i + 2] & 0x3F)));
      i += 3;
    } else {
      throw MalformedClassFile("invalid modified UTF-8 in constant pool");
    }
  }
  return utf16_to_utf8(units);
}

struct PoolEntry {
  std::uint8_t tag = 0;
  std::string text;            // Utf8
  std::uint16_t a = 0, b = 0;  // Class name index, NameAndType parts
};

class ConstantPool {
 public:
  void read(ByteCursor& in) {
    std::uint16_t count = in.u2();
    entries_.assign(count, {});
    for (std::uint16_t i = 1; i < count; ++i) {
      PoolEntry& e = entries_[i];
      e.tag = in.u1();
      switch (e.tag) {
        case 1: e.text = modified_utf8(in.bytes(in.u2())); break;
        case 3: case 4: in.skip(4); break;
        case 5: case 6: in.skip(8); ++i; break;
        case 7: case 8: case 16: case 19: case 20: e.a = in.u2(); break;
        case 9: case 10: case 11: case 12: case 17: case 18:
          e.a = in.u2();
          e.b = in.u2();
          break;
        case 15: in.skip(3); break;
        default:
          throw MalformedClassFile("unknown constant pool tag " +
                                   std::to_string(e.tag) + " at index " +
                                   std::to_string(i));
      }
    }
  }

  const std::string& utf8(std::uint16_t index) const {
    const PoolEntry& e = entry(index, 1);
    return e.text;
  }

  const std::string& class_name(std::uint16_t index) const {
    return utf8(entry(index, 7).a);
  }

 private:
  const PoolEntry& entry(std::uint16_t index, std::uint8_t tag) const {
    if (index == 0 || index >= entries_.size() || entries_[index].tag != tag) {
      throw MalformedClassFile("bad constant pool reference " +
                               std::to_string(index));
    }
    return entries_[index];
  }

  std::vector<PoolEntry> entries_;
};

std::string newarray_type(std::uint8_t atype) {
  auto t = basic_type_from_code(atype);
  if (!t || *t == BasicType::kObject) {
    throw MalformedClassFile("bad newarray type " + std::to_string(atype));
  }
  return std::string(basic_type_name(*t)) + "[]";
}

struct RawAlloc {
  std::uint32_t bci;
  std::string type;
};

std::vector<std::uint32_t> walk(std::span<const std::uint8_t> code,
                                const ConstantPool* pool,
                                std::vector<RawAlloc>* allocs) {
  std::vector<std::uint32_t> offsets;
  ByteCursor in(code);
  while (!in.at_end()) {
    auto pc = static_cast<std::uint32_t>(in.pos());
    offsets.push_back(pc);
    std::uint8_t op = in.u1();
    if (op == kOpTableSwitch || op == kOpLookupSwitch) {
      in.skip((4 - (pc + 1) % 4) % 4);
      in.skip(4);  // default
      if (op == kOpTableSwitch) {
        auto low = static_cast<std::int32_t>(in.u4());
        auto high = static_cast<std::int32_t>(in.u4());
        if (high < low) throw MalformedClassFile("tableswitch high < low");
        in.skip(4 * (static_cast<std::size_t>(static_cast<std::int64_t>(high) - low) + 1));
      } else {
        auto npairs = static_cast<std::int32_t>(in.u4());
        if (npairs < 0) throw MalformedClassFile("lookupswitch npairs < 0");
        in.skip(8 * static_cast<std::size_t>(npairs));
      }
      continue;
    }
    if (op == kOpWide) {
      std::uint8_t inner = in.u1();
      in.skip(inner == kOpIinc ? 4 : 2);
      continue;
    }
    std::uint8_t len = kLengths[op];
    if (len == 0) {
      throw MalformedClassFile("undefined opcode " + std::to_string(op) +
                               " at " + std::to_string(pc));
    }
    if (allocs && (op == kOpNew || op == kOpANewArray || op == kOpMultiANewArray)) {
      std::uint16_t index = in.u2();
      const std::string& name = pool->class_name(index);
      std::string type = dotted_name(name);
      if (op == kOpANewArray) type += "[]";
      allocs->push_back({pc, std::move(type)});
      in.skip(len - 3u);
    } else if (allocs && op == kOpNewArray) {
      allocs->push_back({pc, newarray_type(in.u1())});
    } else {
      in.skip(len - 1u);
    }
  }
  return offsets;
}

std::optional<std::uint32_t> line_at(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& table,
    std::uint32_t bci) {
  std::optional<std::uint32_t> line;
  for (const auto& [start, l] : table) {
    if (start > bci) break;
    line = l;
  }
  return line;
}

MethodMeta read_method(ByteCursor& in, const ConstantPool& pool,
                       const std::string& class_name) {
  MethodMeta m;
  std::uint16_t access = in.u2();
  m.declaring_class = class_name;
  m.name = pool.utf8(in.u2());
  m.descriptor = pool.utf8(in.u2());
  m.is_static = (access & kAccStatic) != 0;
  auto sig = signature_id(m.declaring_class, m.name, m.descriptor);
  if (!sig) {
    throw MalformedClassFile("bad method descriptor " + m.descriptor + " in " +
                             class_name);
  }
  m.signature_id = *sig;

  std::vector<RawAlloc> allocs;
  std::uint16_t attrs = in.u2();
  for (std::uint16_t a = 0; a < attrs; ++a) {
    const std::string& name = pool.utf8(in.u2());
    std::uint32_t len = in.u4();
    ByteCursor body(in.bytes(len));
    if (name != "Code") continue;
    body.skip(4);  // max_stack, max_locals
    std::uint32_t code_len = body.u4();
    auto code = body.bytes(code_len);
    try {
      walk(code, &pool, &allocs);
    } catch (const OutOfBounds&) {
      throw MalformedClassFile("instruction runs past the code length in " +
                               m.signature_id);
    }
    std::uint16_t handlers = body.u2();
    body.skip(8u * handlers);
    std::uint16_t code_attrs = body.u2();
    for (std::uint16_t c = 0; c < code_attrs; ++c) {
      const std::string& cname = pool.utf8(body.u2());
      std::uint32_t clen = body.u4();
      ByteCursor cbody(body.bytes(clen));
      if (cname != "LineNumberTable") continue;
      std::uint16_t n = cbody.u2();
      for (std::uint16_t i = 0; i < n; ++i) {
        std::uint16_t start = cbody.u2();
        std::uint16_t line = cbody.u2();
        m.line_table.emplace_back(start, line);
      }
    }
  }
  std::stable_sort(m.line_table.begin(), m.line_table.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });

  std::map<std::string, std::uint32_t> ordinals;
  for (auto& r : allocs) {
    AllocationInstr ai;
    ai.bytecode_index = r.bci;
    ai.line = line_at(m.line_table, r.bci);
    ai.site_index = ordinals[r.type]++;
    ai.allocated_type = std::move(r.type);
    m.alloc_instructions.push_back(std::move(ai));
  }
  return m;
}

void skip_members(ByteCursor& in) {
  std::uint16_t n = in.u2();
  for (std::uint16_t i = 0; i < n; ++i) {
    in.skip(6);
    std::uint16_t attrs = in.u2();
    for (std::uint16_t a = 0; a < attrs; ++a) {
      in.skip(2);
      in.skip(in.u4());
    }
  }
}

}  // namespace

std::vector<std::uint32_t> instruction_offsets(std::span<const std::uint8_t> code) {
  try {
    return walk(code, nullptr, nullptr);
  } catch (const OutOfBounds&) {
    throw MalformedClassFile("instruction runs past the code length");
  }
}

ClassFileInfo parse_class(std::span<const std::uint8_t> bytes) {
  try {
    ByteCursor in(bytes);
    if (in.u4() != kMagic) throw MalformedClassFile("bad class file magic");
    in.skip(4);  // minor, major
    ConstantPool pool;
    pool.read(in);
    ClassFileInfo info;
    std::uint16_t access = in.u2();
    info.is_interface = (access & kAccInterface) != 0;
    info.name = dotted_name(pool.class_name(in.u2()));
    if (std::uint16_t super = in.u2(); super != 0) {
      info.super_name = dotted_name(pool.class_name(super));
    }
    in.skip(2u * in.u2());  // interfaces
    skip_members(in);       // fields
    std::uint16_t methods = in.u2();
    for (std::uint16_t i = 0; i < methods; ++i) {
      info.methods.push_back(read_method(in, pool, info.name));
    }
    return info;
  } catch (const OutOfBounds& e) {
    throw MalformedClassFile("class file truncated at byte " +
                             std::to_string(e.offset));
  }
}

std::vector<MethodMeta> parse_classfile(std::span<const std::uint8_t> bytes) {
  return parse_class(bytes).methods;
}

}  // namespace heapfacts
