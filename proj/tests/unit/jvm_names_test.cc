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

#include <gtest/gtest.h>

namespace heapfacts {
namespace {

TEST(JvmNames, BasicTypeSizes) {
  EXPECT_EQ(basic_type_size(BasicType::kObject, 4), 4u);
  EXPECT_EQ(basic_type_size(BasicType::kObject, 8), 8u);
  EXPECT_EQ(basic_type_size(BasicType::kBoolean, 8), 1u);
  EXPECT_EQ(basic_type_size(BasicType::kChar, 8), 2u);
  EXPECT_EQ(basic_type_size(BasicType::kShort, 8), 2u);
  EXPECT_EQ(basic_type_size(BasicType::kFloat, 8), 4u);
  EXPECT_EQ(basic_type_size(BasicType::kInt, 8), 4u);
  EXPECT_EQ(basic_type_size(BasicType::kDouble, 4), 8u);
  EXPECT_EQ(basic_type_size(BasicType::kLong, 4), 8u);
}

TEST(JvmNames, BasicTypeCodes) {
  EXPECT_EQ(basic_type_from_code(10), BasicType::kInt);
  EXPECT_EQ(basic_type_from_code(2), BasicType::kObject);
  EXPECT_FALSE(basic_type_from_code(3).has_value());
  EXPECT_FALSE(basic_type_from_code(12).has_value());
  EXPECT_EQ(basic_type_name(BasicType::kBoolean), "boolean");
}

TEST(JvmNames, DottedNames) {
  EXPECT_EQ(dotted_name("java/lang/String"), "java.lang.String");
  EXPECT_EQ(dotted_name("[I"), "int[]");
  EXPECT_EQ(dotted_name("[[Ljava/lang/Object;"), "java.lang.Object[][]");
  EXPECT_EQ(dotted_name("a.b.C"), "a.b.C");
}

TEST(JvmNames, InternalNames) {
  EXPECT_EQ(internal_name("java.lang.String"), "java/lang/String");
  EXPECT_EQ(internal_name("int[]"), "[I");
  EXPECT_EQ(internal_name("a.B[][]"), "[[La/B;");
}

TEST(JvmNames, TypeFromDescriptor) {
  std::size_t used = 0;
  EXPECT_EQ(type_from_descriptor("[[JZ", &used), "long[][]");
  EXPECT_EQ(used, 3u);
  EXPECT_EQ(type_from_descriptor("Ljava/util/Map$Entry;"), "java.util.Map$Entry");
  EXPECT_FALSE(type_from_descriptor("Ljava/lang/String").has_value());
  EXPECT_FALSE(type_from_descriptor("Q").has_value());
}

TEST(JvmNames, DescriptorForType) {
  EXPECT_EQ(descriptor_for_type("int"), "I");
  EXPECT_EQ(descriptor_for_type("java.lang.Object[]"), "[Ljava/lang/Object;");
  EXPECT_EQ(descriptor_for_type("void"), "V");
  EXPECT_FALSE(descriptor_for_type("void[]").has_value());
}

TEST(JvmNames, MethodDescriptor) {
  auto d = parse_method_descriptor("(I[Ljava/lang/String;J)Ljava/lang/Object;");
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->params, (std::vector<std::string>{"int", "java.lang.String[]", "long"}));
  EXPECT_EQ(d->ret, "java.lang.Object");
  EXPECT_FALSE(parse_method_descriptor("(I").has_value());
  EXPECT_FALSE(parse_method_descriptor("()").has_value());
  EXPECT_FALSE(parse_method_descriptor("I)V").has_value());
}

TEST(JvmNames, SignatureIds) {
  EXPECT_EQ(signature_id("Hello", "main", "([Ljava/lang/String;)V"),
            "<Hello: void main(java.lang.String[])>");
  EXPECT_EQ(signature_id("a.B", "<init>", "(IJ)V"), "<a.B: void <init>(int,long)>");
  EXPECT_FALSE(signature_id("a.B", "m", "(").has_value());
}

TEST(JvmNames, ParseSignatureRoundTrip) {
  auto p = parse_signature_id("<a.B: int[] get(java.lang.String,long)>");
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->declaring_class, "a.B");
  EXPECT_EQ(p->return_type, "int[]");
  EXPECT_EQ(p->name, "get");
  EXPECT_EQ(p->params, (std::vector<std::string>{"java.lang.String", "long"}));
  EXPECT_EQ(p->descriptor(), "(Ljava/lang/String;J)[I");
  EXPECT_FALSE(parse_signature_id("a.B.get()").has_value());
}

}  // namespace
}  // namespace heapfacts
