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
// Command-line driver.
//
//   heapfacts facts <dump> [--code path...] [--site-map f]
//                   [--sensitivity flavor:n:m] [--strings-by-content]
//                   [--distinguish-loaders] [--out dir]
//   heapfacts classes <dump> --out archive.jar
//   heapfacts stats <dump>
//   heapfacts recall --reference f --observed f [--method-pair | --exact]
//   heapfacts synth --seed k --out dump [--objects n] [--id-size 4|8]
//
// Any subcommand accepts --config <toml> with the same keys as its flags,
// under a [<subcommand>] table.

#ifndef HEAPFACTS_CLI_H_
#define HEAPFACTS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace heapfacts::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. Results go to `out`, warnings and
// errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace heapfacts::cli

#endif  // HEAPFACTS_CLI_H_
