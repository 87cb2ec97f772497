/*
* Copyright (C) 2026 The stageshift authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef STAGESHIFT_CLI_COMMANDS_HPP
#define STAGESHIFT_CLI_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace stageshift::cli
{

/// Process exit statuses; stable across releases.
enum ExitCode : int
{
    exit_ok               = 0,
    exit_internal         = 1,
    exit_usage            = 2,
    exit_input_error      = 3,
    exit_numerical_error  = 4,
    exit_non_convergence  = 5,
};

struct RunOptions {
    std::string command;
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out_dir = "stageshift-out";
    int threads                   = 0;
};

/// Runs one command, mapping library errors onto exit codes. Messages go to `err`.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

} // namespace stageshift::cli

#endif // STAGESHIFT_CLI_COMMANDS_HPP
