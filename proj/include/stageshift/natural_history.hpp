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
#ifndef STAGESHIFT_NATURAL_HISTORY_HPP
#define STAGESHIFT_NATURAL_HISTORY_HPP

#include "stageshift/ctmc.hpp"
#include "stageshift/params.hpp"

#include <span>
#include <vector>

namespace stageshift
{

/// Survival below this makes a cause-specific hazard non-computable.
inline constexpr double min_survival = 1e-12;

/**
 * lambda24 implied by the hypothesis and a chosen lambda23:
 * (lambda35 + lambda23) / (lambda35 * OMST) - lambda23.
 * Throws ConstraintViolation unless 0 < lambda23 < lambda35 / (lambda35 * OMST - 1).
 */
double lambda24_from_hypothesis(const SojournHypothesis& hypothesis, double lambda23);

/// Early-stage mean sojourn time 1 / (lambda23 + lambda24).
double emst(const NaturalHistoryParams& params);
/// Overall mean sojourn time EMST + lambda23 / (lambda23 + lambda24) / lambda35.
double omst(const NaturalHistoryParams& params);
/// Advanced-stage mean sojourn time 1 / lambda35.
double lmst(const NaturalHistoryParams& params);

/// Cause-specific hazards of early (h4) and advanced (h5) clinical diagnosis by age.
struct HazardCurve {
    std::vector<double> ages;
    std::vector<double> early;
    std::vector<double> advanced;
    /// false where survival fell below min_survival; the hazards there are NaN.
    std::vector<bool> computable;
};

/// ages must be >= 0 and strictly increasing.
HazardCurve hazards(const NaturalHistoryParams& params, std::span<const double> ages);

/// Probability that preclinical onset has occurred by `age` (no other-cause mortality).
double cumulative_onset(const NaturalHistoryParams& params, double age);

/// Probability of clinical diagnosis (either stage) by `age`.
double cumulative_diagnosis(const NaturalHistoryParams& params, double age);

} // namespace stageshift

#endif // STAGESHIFT_NATURAL_HISTORY_HPP
