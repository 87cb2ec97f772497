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
#include "cli/manifest.hpp"
#include "stageshift/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>
#include <memory>

namespace stageshift::cli
{

namespace
{

std::string to_hex(const unsigned char* data, unsigned len)
{
    static const char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += digits[data[i] >> 4];
        out += digits[data[i] & 0xf];
    }
    return out;
}

} // namespace

std::string sha256_bytes(const std::string& bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
        throw Error("SHA-256 digest failed");
    }
    return to_hex(md.data(), len);
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInput("cannot open " + path.string());
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_bytes(bytes);
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest::RunManifest(std::string command, Json config, std::uint64_t seed)
    : m_command(std::move(command))
    , m_config(std::move(config))
    , m_seed(seed)
    , m_started(utc_now())
{
}

void RunManifest::add_input(const std::filesystem::path& path)
{
    for (const auto& [p, digest] : m_inputs) {
        if (p == path.string()) {
            return;
        }
    }
    m_inputs.emplace_back(path.string(), sha256_file(path));
}

void RunManifest::add_output(const std::filesystem::path& path, const std::string& contents)
{
    m_outputs.emplace_back(path.filename().string(), sha256_bytes(contents));
}

void RunManifest::set_status(int exit_code, const std::string& message)
{
    m_exit_code = exit_code;
    m_message   = message;
}

Json RunManifest::to_json() const
{
    Json j;
    j["command"]      = m_command;
    j["tool_version"] = STAGESHIFT_VERSION;
    j["seed"]         = m_seed;
    j["config"]       = m_config;
    Json inputs       = Json::array();
    for (const auto& [p, d] : m_inputs) {
        inputs.push_back({{"path", p}, {"sha256", d}});
    }
    j["inputs"]  = inputs;
    Json outputs = Json::array();
    for (const auto& [p, d] : m_outputs) {
        outputs.push_back({{"file", p}, {"sha256", d}});
    }
    j["outputs"]   = outputs;
    j["started"]   = m_started;
    j["finished"]  = utc_now();
    j["exit_code"] = m_exit_code;
    if (!m_message.empty()) {
        j["message"] = m_message;
    }
    return j;
}

} // namespace stageshift::cli
