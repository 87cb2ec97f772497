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
#ifndef STAGESHIFT_COHORT_SIMULATION_HPP
#define STAGESHIFT_COHORT_SIMULATION_HPP

#include "stageshift/params.hpp"
#include "stageshift/projection.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace stageshift
{

/// Entry ages into the latent milestones of one simulated life; infinity when never reached.
struct LifeHistory {
    static constexpr double never = std::numeric_limits<double>::infinity();
    double early_onset    = never; ///< entry into early preclinical (state 2)
    double advanced_onset = never; ///< entry into advanced preclinical (state 3)
    double clinical       = never; ///< clinical diagnosis (state 4 or 5)
    bool clinical_advanced = false;

    /// Observable state at `age` (right-continuous).
    ObservedState state_at(double age) const;
};

/// Draws exponential dwell times from state 1_1 at age 0 until absorption or `horizon`.
LifeHistory sample_history(const NaturalHistoryParams& params, double horizon, std::mt19937_64& rng);

struct CohortSimulation {
    TrialProjection projection; ///< empirical S_D, J_D, C_D and shifts
    std::int64_t enrolled = 0;  ///< undiagnosed at a1
    std::int64_t sampled  = 0;  ///< including rejected histories
    std::vector<std::int64_t> screen_detected_count;
    std::vector<std::int64_t> interval_clinical_count;
    std::vector<std::int64_t> control_count;
    std::vector<double> screen_detected_se;
    std::vector<double> interval_clinical_se;
    std::vector<double> control_se;
    double cumulative_shift_se = 0.0; ///< delta-method standard error
};

/**
 * Monte Carlo trial: histories diagnosed before a1 are rejected until `enrollees` are accepted.
 * Each enrollee is followed in both arms (common random numbers). Work is split into fixed
 * chunks seeded from (seed, chunk index), so results do not depend on the thread count.
 */
CohortSimulation simulate_cohort(const NaturalHistoryParams& params, const ScreeningProtocol& protocol,
                                 std::int64_t enrollees, std::uint64_t seed, int threads = 0);

} // namespace stageshift

#endif // STAGESHIFT_COHORT_SIMULATION_HPP
