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
#ifndef STAGESHIFT_CLI_MANIFEST_HPP
#define STAGESHIFT_CLI_MANIFEST_HPP

#include "stageshift/serialization.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stageshift::cli
{

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(const std::string& bytes);

/// UTC timestamp in ISO 8601 with seconds.
std::string utc_now();

/// Record of one invocation, written to manifest.json last.
class RunManifest
{
public:
    RunManifest(std::string command, Json config, std::uint64_t seed);

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path, const std::string& contents);
    void set_status(int exit_code, const std::string& message = {});

    Json to_json() const;

private:
    std::string m_command;
    Json m_config;
    std::uint64_t m_seed;
    std::string m_started;
    std::vector<std::pair<std::string, std::string>> m_inputs;
    std::vector<std::pair<std::string, std::string>> m_outputs;
    int m_exit_code = 0;
    std::string m_message;
};

} // namespace stageshift::cli

#endif // STAGESHIFT_CLI_MANIFEST_HPP
