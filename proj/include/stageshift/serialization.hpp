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
#ifndef STAGESHIFT_SERIALIZATION_HPP
#define STAGESHIFT_SERIALIZATION_HPP

#include "stageshift/calibration.hpp"
#include "stageshift/params.hpp"
#include "stageshift/projection.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace stageshift
{

using Json = nlohmann::ordered_json;

/// {"theta": [...], "lambda23", "lambda24", "lambda35"} plus derived omst, lmst, emst for reference.
Json to_json(const NaturalHistoryParams& params);
/// Accepts explicit rates, or theta + lambda23 + omst + lmst (lambda24, lambda35 then follow from the hypothesis).
NaturalHistoryParams params_from_json(const Json& j);

Json to_json(const SojournHypothesis& hypothesis);
SojournHypothesis hypothesis_from_json(const Json& j);

/// {"screen_ages", "followup_end", "sensitivity_early", "sensitivity_advanced"}
Json to_json(const ScreeningProtocol& protocol);
ScreeningProtocol protocol_from_json(const Json& j);

/// Diagnostics: loglik, convention, deviance, converged, iterations, gradient norm, k, hypothesis, ...
Json fit_diagnostics(const FitResult& fit);

/// Parses a JSON file; MissingInput if absent, ParseError if malformed.
Json read_json_file(const std::filesystem::path& path);

/// Writes `contents` next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

} // namespace stageshift

#endif // STAGESHIFT_SERIALIZATION_HPP
