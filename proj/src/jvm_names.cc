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

#include "heapfacts/jvm_names.h"

#include <algorithm>

namespace heapfacts {
namespace {

std::optional<std::string_view> primitive_for(char c) {
  switch (c) {
    case 'Z': return "boolean";
    case 'C': return "char";
    case 'F': return "float";
    case 'D': return "double";
    case 'B': return "byte";
    case 'S': return "short";
    case 'I': return "int";
    case 'J': return "long";
    case 'V': return "void";
  }
  return std::nullopt;
}

std::optional<char> code_for_primitive(std::string_view name) {
  static constexpr std::pair<std::string_view, char> kTable[] = {
      {"boolean", 'Z'}, {"char", 'C'}, {"float", 'F'}, {"double", 'D'},
      {"byte", 'B'},    {"short", 'S'}, {"int", 'I'},  {"long", 'J'},
      {"void", 'V'},
  };
  for (const auto& [n, c] : kTable) {
    if (n == name) return c;
  }
  return std::nullopt;
}

std::string slashes_to_dots(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '/', '.');
  return out;
}

}  // namespace

std::optional<BasicType> basic_type_from_code(std::uint8_t code) {
  switch (code) {
    case 2: case 4: case 5: case 6: case 7: case 8: case 9: case 10: case 11:
      return static_cast<BasicType>(code);
  }
  return std::nullopt;
}

std::size_t basic_type_size(BasicType type, std::uint32_t id_size) {
  switch (type) {
    case BasicType::kObject: return id_size;
    case BasicType::kBoolean:
    case BasicType::kByte: return 1;
    case BasicType::kChar:
    case BasicType::kShort: return 2;
    case BasicType::kFloat:
    case BasicType::kInt: return 4;
    case BasicType::kDouble:
    case BasicType::kLong: return 8;
  }
  return 0;
}

std::string_view basic_type_name(BasicType type) {
  switch (type) {
    case BasicType::kObject: return "java.lang.Object";
    case BasicType::kBoolean: return "boolean";
    case BasicType::kChar: return "char";
    case BasicType::kFloat: return "float";
    case BasicType::kDouble: return "double";
    case BasicType::kByte: return "byte";
    case BasicType::kShort: return "short";
    case BasicType::kInt: return "int";
    case BasicType::kLong: return "long";
  }
  return "?";
}

std::optional<std::string> type_from_descriptor(std::string_view desc,
                                                std::size_t* consumed) {
  std::size_t dims = 0;
  while (dims < desc.size() && desc[dims] == '[') ++dims;
  if (dims == desc.size()) return std::nullopt;
  std::string base;
  std::size_t used = dims + 1;
  if (desc[dims] == 'L') {
    auto semi = desc.find(';', dims);
    if (semi == std::string_view::npos || semi == dims + 1) return std::nullopt;
    base = slashes_to_dots(desc.substr(dims + 1, semi - dims - 1));
    used = semi + 1;
  } else {
    auto prim = primitive_for(desc[dims]);
    if (!prim || (*prim == "void" && dims > 0)) return std::nullopt;
    base = *prim;
  }
  for (std::size_t i = 0; i < dims; ++i) base += "[]";
  if (consumed) *consumed = used;
  return base;
}

std::string dotted_name(std::string_view name) {
  if (!name.empty() && name.front() == '[') {
    std::size_t used = 0;
    auto t = type_from_descriptor(name, &used);
    if (t && used == name.size()) return *t;
  }
  return slashes_to_dots(name);
}

std::string internal_name(std::string_view dotted) {
  if (dotted.size() > 2 && dotted.substr(dotted.size() - 2) == "[]") {
    return descriptor_for_type(dotted).value_or(std::string(dotted));
  }
  std::string out(dotted);
  std::replace(out.begin(), out.end(), '.', '/');
  return out;
}

std::optional<std::string> descriptor_for_type(std::string_view type) {
  std::string prefix;
  while (type.size() >= 2 && type.substr(type.size() - 2) == "[]") {
    prefix += '[';
    type.remove_suffix(2);
  }
  if (type.empty()) return std::nullopt;
  if (auto c = code_for_primitive(type)) {
    if (*c == 'V' && !prefix.empty()) return std::nullopt;
    return prefix + *c;
  }
  std::string out = prefix + "L";
  for (char c : type) out += c == '.' ? '/' : c;
  out += ';';
  return out;
}

std::optional<MethodDescriptor> parse_method_descriptor(std::string_view desc) {
  if (desc.empty() || desc.front() != '(') return std::nullopt;
  MethodDescriptor out;
  std::size_t pos = 1;
  while (pos < desc.size() && desc[pos] != ')') {
    std::size_t used = 0;
    auto t = type_from_descriptor(desc.substr(pos), &used);
    if (!t || *t == "void") return std::nullopt;
    out.params.push_back(std::move(*t));
    pos += used;
  }
  if (pos >= desc.size()) return std::nullopt;
  ++pos;
  std::size_t used = 0;
  auto ret = type_from_descriptor(desc.substr(pos), &used);
  if (!ret || pos + used != desc.size()) return std::nullopt;
  out.ret = std::move(*ret);
  return out;
}

std::string signature_id(std::string_view declaring_class,
                         std::string_view method_name,
                         const MethodDescriptor& descriptor) {
  std::string out = "<";
  out += declaring_class;
  out += ": ";
  out += descriptor.ret;
  out += ' ';
  out += method_name;
  out += '(';
  for (std::size_t i = 0; i < descriptor.params.size(); ++i) {
    if (i) out += ',';
    out += descriptor.params[i];
  }
  out += ")>";
  return out;
}

std::optional<std::string> signature_id(std::string_view declaring_class,
                                        std::string_view method_name,
                                        std::string_view descriptor) {
  auto parsed = parse_method_descriptor(descriptor);
  if (!parsed) return std::nullopt;
  return signature_id(declaring_class, method_name, *parsed);
}

std::optional<std::string> ParsedSignature::descriptor() const {
  std::string out = "(";
  for (const auto& p : params) {
    auto d = descriptor_for_type(p);
    if (!d || *d == "V") return std::nullopt;
    out += *d;
  }
  out += ')';
  auto r = descriptor_for_type(return_type);
  if (!r) return std::nullopt;
  return out + *r;
}

std::optional<ParsedSignature> parse_signature_id(std::string_view sig) {
  if (sig.size() < 2 || sig.front() != '<' || sig.back() != '>') {
    return std::nullopt;
  }
  sig = sig.substr(1, sig.size() - 2);
  auto colon = sig.find(": ");
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  ParsedSignature out;
  out.declaring_class = std::string(sig.substr(0, colon));
  std::string_view rest = sig.substr(colon + 2);
  auto space = rest.find(' ');
  auto open = rest.find('(');
  if (space == std::string_view::npos || open == std::string_view::npos ||
      space == 0 || open <= space + 1 || rest.back() != ')') {
    return std::nullopt;
  }
  out.return_type = std::string(rest.substr(0, space));
  out.name = std::string(rest.substr(space + 1, open - space - 1));
  std::string_view args = rest.substr(open + 1, rest.size() - open - 2);
  while (!args.empty()) {
    auto comma = args.find(',');
    std::string_view a = args.substr(0, comma);
    if (a.empty()) return std::nullopt;
    out.params.emplace_back(a);
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
    if (args.empty()) return std::nullopt;
  }
  return out;
}

}  // namespace heapfacts
