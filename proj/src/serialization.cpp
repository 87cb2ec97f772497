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
#include "stageshift/serialization.hpp"
#include "stageshift/errors.hpp"
#include "stageshift/natural_history.hpp"

#include <fstream>
#include <sstream>

namespace stageshift
{

namespace
{

template <class T>
T required(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing key '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("key '") + key + "' has the wrong type");
    }
}

} // namespace

Json to_json(const NaturalHistoryParams& params)
{
    Json j;
    j["theta"]    = params.theta;
    j["lambda23"] = params.lambda23;
    j["lambda24"] = params.lambda24;
    j["lambda35"] = params.lambda35;
    j["omst"]     = omst(params);
    j["lmst"]     = lmst(params);
    j["emst"]     = emst(params);
    return j;
}

NaturalHistoryParams params_from_json(const Json& j)
{
    auto theta          = required<std::vector<double>>(j, "theta");
    const double l23    = required<double>(j, "lambda23");
    NaturalHistoryParams p;
    if (j.contains("lambda24") || j.contains("lambda35")) {
        p.theta    = std::move(theta);
        p.lambda23 = l23;
        p.lambda24 = required<double>(j, "lambda24");
        p.lambda35 = required<double>(j, "lambda35");
    }
    else {
        p = NaturalHistoryParams::from_hypothesis(std::move(theta), l23, hypothesis_from_json(j));
    }
    p.validate();
    return p;
}

Json to_json(const SojournHypothesis& hypothesis)
{
    return Json{{"omst", hypothesis.omst}, {"lmst", hypothesis.lmst}};
}

SojournHypothesis hypothesis_from_json(const Json& j)
{
    SojournHypothesis h{required<double>(j, "omst"), required<double>(j, "lmst")};
    h.validate();
    return h;
}

Json to_json(const ScreeningProtocol& protocol)
{
    Json j;
    j["screen_ages"]          = protocol.screen_ages;
    j["followup_end"]         = protocol.followup_end;
    j["sensitivity_early"]    = protocol.sensitivity.early;
    j["sensitivity_advanced"] = protocol.sensitivity.advanced;
    return j;
}

ScreeningProtocol protocol_from_json(const Json& j)
{
    ScreeningProtocol p;
    p.screen_ages          = required<std::vector<double>>(j, "screen_ages");
    p.followup_end         = required<double>(j, "followup_end");
    p.sensitivity.early    = required<double>(j, "sensitivity_early");
    p.sensitivity.advanced = required<double>(j, "sensitivity_advanced");
    p.validate();
    return p;
}

Json fit_diagnostics(const FitResult& fit)
{
    Json j;
    j["k"]                   = fit.k;
    j["hypothesis"]          = to_json(fit.hypothesis);
    j["risk_inflation"]      = fit.risk_inflation;
    j["loglik"]              = fit.loglik;
    j["loglik_convention"]   = std::string(to_string(fit.convention));
    j["deviance"]            = fit.deviance;
    j["converged"]           = fit.converged;
    j["iterations"]          = fit.iterations;
    j["gradient_norm"]       = fit.gradient_norm;
    j["degenerate"]          = fit.degenerate;
    j["start_index"]         = fit.start_index;
    j["emst"]                = emst(fit.params);
    return j;
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MissingInput("cannot open " + path.string());
    }
    try {
        return Json::parse(in, nullptr, true, true);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            throw Error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

} // namespace stageshift
