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
#ifndef STAGESHIFT_PARAMS_HPP
#define STAGESHIFT_PARAMS_HPP

#include <vector>

namespace stageshift
{

/**
 * Hypothesized mean preclinical sojourn times (years).
 *
 * omst is the overall mean time from preclinical onset to clinical diagnosis,
 * lmst the mean time spent in the advanced preclinical state. Together they close
 * the identifiability gap left by incidence data.
 */
struct SojournHypothesis {
    double omst = 0.0;
    double lmst = 0.0;

    /// Throws InvalidParameter unless 0 < lmst < omst.
    void validate() const;

    double lambda35() const
    {
        return 1.0 / lmst;
    }

    /// Open upper bound on lambda23 that keeps lambda24 positive.
    double lambda23_upper_bound() const;
};

/**
 * Rates (per year) of the latent CTMC: theta holds the k onset-phase rates
 * 1_1 -> 1_2 -> ... -> 1_k -> 2; lambda23 is preclinical progression,
 * lambda24 and lambda35 are clinical surfacing from the early and advanced states.
 */
struct NaturalHistoryParams {
    std::vector<double> theta;
    double lambda23 = 0.0;
    double lambda24 = 0.0;
    double lambda35 = 0.0;

    /// Builds params with lambda35 = 1/LMST and lambda24 closed by the OMST relation.
    static NaturalHistoryParams from_hypothesis(std::vector<double> theta, double lambda23,
                                                const SojournHypothesis& hypothesis);

    int onset_phases() const
    {
        return static_cast<int>(theta.size());
    }

    /// Throws InvalidParameter if theta is empty or any rate is not finite and > 0.
    void validate() const;

    bool operator==(const NaturalHistoryParams&) const = default;
};

} // namespace stageshift

#endif // STAGESHIFT_PARAMS_HPP
