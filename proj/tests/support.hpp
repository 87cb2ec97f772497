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
#ifndef STAGESHIFT_TESTS_SUPPORT_HPP
#define STAGESHIFT_TESTS_SUPPORT_HPP

#include "stageshift/params.hpp"
#include "stageshift/projection.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

namespace support
{

inline const std::filesystem::path data_dir{STAGESHIFT_TEST_DATA_DIR};
inline const std::filesystem::path config_dir{STAGESHIFT_TEST_CONFIG_DIR};

/// The k = 1 model used throughout the examples: theta 0.5, lambda23 0.4, lambda24 0.2, lambda35 2.
inline stageshift::NaturalHistoryParams toy_k1()
{
    stageshift::NaturalHistoryParams p;
    p.theta    = {0.5};
    p.lambda23 = 0.4;
    p.lambda24 = 0.2;
    p.lambda35 = 2.0;
    return p;
}

/// A slower k = 1 model whose onset is spread over adult ages.
inline stageshift::NaturalHistoryParams slow_k1()
{
    stageshift::NaturalHistoryParams p;
    p.theta    = {0.01};
    p.lambda23 = 0.3;
    p.lambda24 = 0.25;
    p.lambda35 = 1.0;
    return p;
}

/// Random admissible model: onset rates log-uniform in [lo, hi], lambda23 within its bound.
inline stageshift::NaturalHistoryParams random_params(std::mt19937_64& rng, int k, double lo = 0.01, double hi = 0.5)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> theta(k);
    for (double& t : theta) {
        t = lo * std::pow(hi / lo, u(rng));
    }
    stageshift::SojournHypothesis hyp;
    hyp.lmst           = 0.3 + 1.5 * u(rng);
    hyp.omst           = hyp.lmst + 0.5 + 5.0 * u(rng);
    const double bound = hyp.lambda23_upper_bound();
    return stageshift::NaturalHistoryParams::from_hypothesis(theta, bound * (0.05 + 0.9 * u(rng)), hyp);
}

/// Random model whose onset is spread over adult ages, so survival stays well away from zero.
inline stageshift::NaturalHistoryParams random_adult_params(std::mt19937_64& rng, int k)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mean_onset = 60.0 + 90.0 * u(rng);
    std::vector<double> theta(k);
    for (double& t : theta) {
        t = k / mean_onset * (0.7 + 0.6 * u(rng));
    }
    stageshift::SojournHypothesis hyp;
    hyp.lmst = 0.4 + 1.2 * u(rng);
    hyp.omst = hyp.lmst + 0.5 + 5.0 * u(rng);
    return stageshift::NaturalHistoryParams::from_hypothesis(theta, hyp.lambda23_upper_bound() * (0.1 + 0.8 * u(rng)),
                                                             hyp);
}

inline stageshift::ScreeningProtocol random_protocol(std::mt19937_64& rng, int screens, double first_lo = 1.0,
                                                     double first_hi = 20.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    stageshift::ScreeningProtocol p;
    double age = first_lo + (first_hi - first_lo) * u(rng);
    for (int i = 0; i < screens; ++i) {
        p.screen_ages.push_back(age);
        age += 0.5 + 2.0 * u(rng);
    }
    p.followup_end           = age;
    p.sensitivity.early      = u(rng);
    p.sensitivity.advanced   = u(rng);
    return p;
}

inline double relative_error(double a, double b)
{
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

} // namespace support

#endif // STAGESHIFT_TESTS_SUPPORT_HPP
