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
// A receiver chain r0 <- r1 <- r2 <- r3 <- r4 with known sites, plus a
// static-method allocation, an unbound object and a commonplace string. The
// oracle walks the builder's own bookkeeping, never the decoded heap.

#ifndef HEAPFACTS_TESTS_CONTEXT_ORACLE_H_
#define HEAPFACTS_TESTS_CONTEXT_ORACLE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heapfacts/dump_synth.h"

namespace heapfacts::testing {

inline constexpr const char* kPad = "<<immutable-context>>";

struct ChainFixture {
  SynthProgram program;
  std::string site_map;
  std::vector<ObjectId> receivers;
  ObjectId static_alloc = 0;
  ObjectId unbound = 0;
  ObjectId text = 0;
  std::map<ObjectId, std::optional<ObjectId>> ctx_of;
  std::map<ObjectId, std::string> site_key;
  std::map<ObjectId, std::string> allocator;
  std::map<ObjectId, std::vector<FrameView>> callers;  // frames above the site
};

inline ChainFixture make_chain_fixture(std::size_t length = 5) {
  ChainFixture f;
  SynthProgram& p = f.program;
  p.add_class("app.Node", "java.lang.Object", {{"next", BasicType::kObject}});
  const FrameView main_frame = frame("app.Main", "main", "([Ljava/lang/String;)V", 3);

  auto record = [&](ObjectId id, const std::string& cls, const std::string& method,
                    const std::string& ret, std::uint32_t line,
                    std::vector<FrameView> above) {
    std::string sig = "<" + cls + ": " + ret + " " + method + "()>";
    f.site_map += sig + "\tapp.Node\t" + std::to_string(line) + "\t0\n";
    f.site_key[id] = sig + "/new app.Node/0";
    f.allocator[id] = cls;
    f.callers[id] = std::move(above);
  };

  for (std::size_t i = 0; i < length; ++i) {
    std::string cls = "app.C" + std::to_string(i);
    std::uint32_t line = 10 + static_cast<std::uint32_t>(i);
    std::vector<FrameView> above{frame("app.Driver", "step" + std::to_string(i), "()V", 20),
                                 main_frame};
    std::vector<FrameView> frames{frame("app.Node", "<init>", "()V", 1),
                                  frame(cls, "make", "()Lapp/Node;", line)};
    frames.insert(frames.end(), above.begin(), above.end());
    ObjectId r = p.new_instance("app.Node", p.add_trace(std::move(frames)));
    f.receivers.push_back(r);
    record(r, cls, "make", "app.Node", line, above);
  }
  for (std::size_t i = 0; i < length; ++i) {
    std::optional<ObjectId> ctx;
    if (i + 1 < length) ctx = f.receivers[i + 1];
    f.ctx_of[f.receivers[i]] = ctx;
    // The outermost receiver comes from static code with no receiver.
    p.new_obj_and_ctx(f.receivers[i], ctx);
  }

  // Static helper called from r2's method: the context is the caller's
  // receiver.
  std::vector<FrameView> above{frame("app.C2", "make", "()Lapp/Node;", 12), main_frame};
  std::vector<FrameView> frames{frame("app.Util", "helper", "()Lapp/Node;", 50)};
  frames.insert(frames.end(), above.begin(), above.end());
  f.static_alloc = p.new_instance("app.Node", p.add_trace(std::move(frames)));
  record(f.static_alloc, "app.Util", "helper", "app.Node", 50, above);
  f.ctx_of[f.static_alloc] = f.receivers[2];
  p.new_obj_and_ctx(f.static_alloc, f.receivers[2]);

  f.unbound = p.new_instance("app.Node", p.add_trace({frame("app.Main", "main",
                                                           "([Ljava/lang/String;)V", 5)}));
  f.site_map += "<app.Main: void main(java.lang.String[])>\tapp.Node\t5\t0\n";
  f.site_key[f.unbound] = "<app.Main: void main(java.lang.String[])>/new app.Node/0";
  f.allocator[f.unbound] = "app.Main";
  f.callers[f.unbound] = {};
  f.ctx_of[f.unbound] = std::nullopt;

  // Commonplace objects never carry a context, even when bound.
  f.text = p.new_string("label");
  p.new_obj_and_ctx(f.text, f.receivers[0]);
  f.ctx_of[f.text] = f.receivers[0];
  return f;
}

enum class OracleFlavor { kObject, kType, kCallSite };

// Iterative pointer chase over the builder's bookkeeping.
inline std::vector<std::string> oracle_heap_context(const ChainFixture& f, ObjectId obj,
                                                    std::size_t k, OracleFlavor flavor) {
  std::vector<std::string> out;
  if (obj == f.text) return std::vector<std::string>(k, kPad);
  if (flavor == OracleFlavor::kCallSite) {
    for (const auto& fr : f.callers.at(obj)) {
      if (out.size() == k) break;
      out.push_back(*signature_id(fr.class_name, fr.method_name, fr.method_descriptor) + "@" +
                    (fr.line ? std::to_string(*fr.line) : "-"));
    }
  } else {
    std::optional<ObjectId> cur = f.ctx_of.at(obj);
    while (cur && out.size() < k) {
      out.push_back(flavor == OracleFlavor::kObject ? f.site_key.at(*cur) : f.allocator.at(*cur));
      cur = f.ctx_of.at(*cur);
    }
  }
  while (out.size() < k) out.push_back(kPad);
  return out;
}

}  // namespace heapfacts::testing

#endif  // HEAPFACTS_TESTS_CONTEXT_ORACLE_H_
