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
#include "stageshift/cohort_simulation.hpp"
#include "stageshift/ctmc.hpp"
#include "stageshift/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace stageshift
{

namespace
{

constexpr std::int64_t chunk_size = 1 << 16;

struct Tally {
    std::int64_t sampled = 0;
    std::vector<std::int64_t> screen, interval, control;
    std::int64_t screened_advanced = 0; // people with S_D or J_D
    std::int64_t control_advanced  = 0;
    std::int64_t both_advanced     = 0;

    explicit Tally(int n)
        : screen(n, 0)
        , interval(n, 0)
        , control(n, 0)
    {
    }
};

double binomial_se(double p, double n)
{
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
}

} // namespace

ObservedState LifeHistory::state_at(double age) const
{
    if (age >= clinical) {
        return clinical_advanced ? ObservedState::AdvancedClinical : ObservedState::EarlyClinical;
    }
    if (age >= advanced_onset) {
        return ObservedState::AdvancedPreclinical;
    }
    if (age >= early_onset) {
        return ObservedState::EarlyPreclinical;
    }
    return ObservedState::NoCancer;
}

LifeHistory sample_history(const NaturalHistoryParams& params, double horizon, std::mt19937_64& rng)
{
    std::exponential_distribution<double> unit(1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    LifeHistory h;
    double t = 0.0;
    for (double rate : params.theta) {
        t += unit(rng) / rate;
        if (t > horizon) {
            return h;
        }
    }
    h.early_onset = t;
    t += unit(rng) / (params.lambda23 + params.lambda24);
    if (uniform(rng) * (params.lambda23 + params.lambda24) < params.lambda24) {
        h.clinical = t;
        return h;
    }
    h.advanced_onset = t;
    if (t > horizon) {
        return h;
    }
    h.clinical          = t + unit(rng) / params.lambda35;
    h.clinical_advanced = true;
    return h;
}

CohortSimulation simulate_cohort(const NaturalHistoryParams& params, const ScreeningProtocol& protocol,
                                 std::int64_t enrollees, std::uint64_t seed, int threads)
{
    params.validate();
    protocol.validate();
    if (enrollees < 1) {
        throw InvalidParameter("number of simulated individuals must be >= 1");
    }
    const int n          = protocol.screens();
    const double a1      = protocol.screen_ages.front();
    const double horizon = protocol.followup_end;
    const double be      = protocol.sensitivity.early;
    const double bl      = protocol.sensitivity.advanced;

    const std::int64_t chunks = (enrollees + chunk_size - 1) / chunk_size;
    std::vector<Tally> tallies(static_cast<std::size_t>(chunks), Tally(n));

    detail::parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(c)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        Tally& tally             = tallies[c];
        const std::int64_t first = static_cast<std::int64_t>(c) * chunk_size;
        const std::int64_t count = std::min(chunk_size, enrollees - first);
        std::int64_t accepted    = 0;
        while (accepted < count) {
            const LifeHistory h = sample_history(params, horizon, rng);
            ++tally.sampled;
            if (h.clinical < a1) {
                continue;
            }
            ++accepted;

            bool control_adv = false;
            if (h.clinical_advanced) {
                for (int l = 1; l <= n; ++l) {
                    const double lo = protocol.observation_age(l), hi = protocol.observation_age(l + 1);
                    if (h.clinical >= lo && h.clinical < hi) {
                        ++tally.control[l - 1];
                        control_adv = true;
                        break;
                    }
                }
            }

            bool screened_adv = false;
            for (int l = 1; l <= n; ++l) {
                const double age          = protocol.observation_age(l);
                const ObservedState state = h.state_at(age);
                const double u            = uniform(rng);
                if (state == ObservedState::EarlyPreclinical && u < be) {
                    break;
                }
                if (state == ObservedState::AdvancedPreclinical && u < bl) {
                    ++tally.screen[l - 1];
                    screened_adv = true;
                    break;
                }
                const double next = protocol.observation_age(l + 1);
                if (h.clinical > age && h.clinical <= next) {
                    if (h.clinical_advanced) {
                        ++tally.interval[l - 1];
                        screened_adv = true;
                    }
                    break;
                }
            }
            tally.screened_advanced += screened_adv;
            tally.control_advanced += control_adv;
            tally.both_advanced += screened_adv && control_adv;
        }
    });

    Tally total(n);
    for (const auto& t : tallies) {
        total.sampled += t.sampled;
        for (int l = 0; l < n; ++l) {
            total.screen[l] += t.screen[l];
            total.interval[l] += t.interval[l];
            total.control[l] += t.control[l];
        }
        total.screened_advanced += t.screened_advanced;
        total.control_advanced += t.control_advanced;
        total.both_advanced += t.both_advanced;
    }

    CohortSimulation out;
    out.enrolled                = enrollees;
    out.sampled                 = total.sampled;
    out.screen_detected_count   = total.screen;
    out.interval_clinical_count = total.interval;
    out.control_count           = total.control;
    out.projection.protocol     = protocol;
    const double m              = static_cast<double>(enrollees);
    for (int l = 0; l < n; ++l) {
        const double s = total.screen[l] / m, j = total.interval[l] / m, c = total.control[l] / m;
        out.projection.screen_detected.push_back(s);
        out.projection.interval_clinical.push_back(j);
        out.projection.control.push_back(c);
        out.projection.interval_shifts.push_back(c > 0.0 ? (c - s - j) / c : std::nan(""));
        out.screen_detected_se.push_back(binomial_se(s, m));
        out.interval_clinical_se.push_back(binomial_se(j, m));
        out.control_se.push_back(binomial_se(c, m));
    }

    const double x = total.screened_advanced / m, c = total.control_advanced / m, xc = total.both_advanced / m;
    if (c > 0.0) {
        const double r            = x / c;
        out.projection.cumulative_shift = 1.0 - r;
        const double var          = (x * (1 - x) + r * r * c * (1 - c) - 2.0 * r * (xc - x * c)) / (c * c * m);
        out.cumulative_shift_se   = std::sqrt(std::max(0.0, var));
    }
    else {
        out.projection.cumulative_shift = std::nan("");
        out.cumulative_shift_se         = std::nan("");
    }
    return out;
}

} // namespace stageshift
