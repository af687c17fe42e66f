// Copyright 2026 The Concet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCET_CLI_HPP_
#define CONCET_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace concet {
namespace cli {

// Runs one invocation of the concet tool. `args` holds the arguments
// without the program name. Returns the process exit code: 0 on success,
// 1 on usage errors (help text goes to `err`), 2 on data or model errors
// (a diagnostic naming the offending file or record goes to `err`).
//
// Subcommands: build-kb, pmi-estimate, link, gen-synthetic, topics-fit,
// train, eval, predict. Every subcommand accepts --seed and --config; a
// config file holds key=value lines and command-line flags override it.
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

// argv form wired to the standard streams.
int run(int argc, const char* const* argv);

}  // namespace cli
}  // namespace concet

#endif  // CONCET_CLI_HPP_
