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
#include "oracles/oracles.hpp"
#include "support.hpp"

#include "stageshift/errors.hpp"
#include "stageshift/natural_history.hpp"
#include "stageshift/serialization.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <string>

using namespace stageshift;

namespace
{

NaturalHistoryParams lung_fixture(const std::string& name)
{
    return params_from_json(read_json_file(support::data_dir / "params" / (name + ".json")));
}

} // namespace

TEST_CASE("lambda24 closes the OMST relation")
{
    const SojournHypothesis h{2.0, 0.5};
    CHECK(lambda24_from_hypothesis(h, 0.4) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(h.lambda23_upper_bound() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(lambda24_from_hypothesis(h, 0.6667), ConstraintViolation);
    CHECK_THROWS_AS(lambda24_from_hypothesis(h, 0.0), ConstraintViolation);
    try {
        lambda24_from_hypothesis(h, 0.7);
    } catch (const ConstraintViolation& e) {
        CHECK(std::string(e.what()).find("0.666") != std::string::npos);
    }
    CHECK(lambda24_from_hypothesis(h, 1e-12) == doctest::Approx(1.0 / h.omst).epsilon(1e-10));
}

TEST_CASE("hypotheses with LMST >= OMST are rejected")
{
    CHECK_THROWS_AS((SojournHypothesis{1.0, 1.0}.validate()), InvalidParameter);
    CHECK_THROWS_AS((SojournHypothesis{1.0, 2.0}.validate()), InvalidParameter);
    CHECK_NOTHROW((SojournHypothesis{4.0, 1.4}.validate()));
}

TEST_CASE("mean sojourn times")
{
    NaturalHistoryParams p = support::toy_k1();
    CHECK(emst(p) == doctest::Approx(1.0 / 0.6));
    p.lambda23 = 1.0;
    p.lambda24 = 1.0;
    CHECK(omst(p) == doctest::Approx(0.75));
    CHECK(lmst(p) == doctest::Approx(0.5));

    const SojournHypothesis h{4.0, 1.0};
    for (double l23 : {0.01, 0.1, 0.2, 0.3, 0.33}) {
        const auto q = NaturalHistoryParams::from_hypothesis({0.1}, l23, h);
        CHECK(omst(q) == doctest::Approx(4.0).epsilon(1e-13));
        CHECK(q.lambda35 == doctest::Approx(1.0));
        CHECK(emst(q) < omst(q));
    }
    p.lambda23 = 1e-12;
    CHECK(omst(p) == doctest::Approx(1.0 / p.lambda24).epsilon(1e-9));
}

TEST_CASE("random hypotheses round-trip through OMST and keep EMST below OMST")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const NaturalHistoryParams p = support::random_params(rng, 1 + i % 5);
        const SojournHypothesis h{omst(p), lmst(p)};
        CHECK(emst(p) < omst(p));
        CHECK(lmst(p) < omst(p));
        const auto q = NaturalHistoryParams::from_hypothesis(p.theta, p.lambda23, h);
        CHECK(support::relative_error(q.lambda24, p.lambda24) < 1e-12);
    }
}

TEST_CASE("hazards vanish at birth and are non-negative")
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const NaturalHistoryParams p = support::random_params(rng, 1 + i % 4);
        const std::array<double, 6> ages{0.0, 2.5, 17.5, 42.5, 67.5, 87.5};
        const HazardCurve c = hazards(p, ages);
        CHECK(c.early[0] == 0.0);
        CHECK(c.advanced[0] == 0.0);
        for (std::size_t a = 0; a < ages.size(); ++a) {
            REQUIRE(c.computable[a]);
            CHECK(c.early[a] >= 0.0);
            CHECK(c.advanced[a] >= 0.0);
            CHECK(std::isfinite(c.early[a]));
        }
    }
}

TEST_CASE("k = 1 hazards agree with nested quadrature at age 60")
{
    const NaturalHistoryParams p = support::slow_k1();
    const std::array<double, 1> age{60.0};
    const HazardCurve c = hazards(p, age);
    const auto ref      = oracle::k1_hazards(p.theta[0], p.lambda23, p.lambda24, p.lambda35, 60.0);
    CHECK(std::fabs(c.early[0] - ref.early) < 1e-6);
    CHECK(std::fabs(c.advanced[0] - ref.advanced) < 1e-6);

    // The fast toy model has almost nobody undiagnosed by 60, so its hazard is flagged there.
    const NaturalHistoryParams toy = support::toy_k1();
    CHECK(!hazards(toy, age).computable[0]);
    const std::array<double, 1> young{6.0};
    const HazardCurve t = hazards(toy, young);
    const auto tref     = oracle::k1_hazards(toy.theta[0], toy.lambda23, toy.lambda24, toy.lambda35, 6.0);
    CHECK(std::fabs(t.early[0] - tref.early) < 1e-6);
    CHECK(std::fabs(t.advanced[0] - tref.advanced) < 1e-6);
}

TEST_CASE("hazard times survival is the derivative of cumulative stage-specific diagnosis")
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 25; ++i) {
        const NaturalHistoryParams p = support::random_params(rng, 1 + i % 6, 0.02, 0.6);
        const IntensityMatrix q      = build_intensity(p);
        const int s4 = q.space().early_clinical(), s5 = q.space().advanced_clinical();
        for (double a : {7.5, 32.5, 57.5, 82.5}) {
            const std::array<double, 1> age{a};
            const HazardCurve c = hazards(p, age);
            const double surv   = 1.0 - cumulative_diagnosis(p, a);
            const double h      = 1e-5;
            const TransitionMatrix up = transition_matrix(q, a + h), dn = transition_matrix(q, a - h);
            CHECK(std::fabs(c.early[0] * surv - (up(0, s4) - dn(0, s4)) / (2 * h)) < 1e-5);
            CHECK(std::fabs(c.advanced[0] * surv - (up(0, s5) - dn(0, s5)) / (2 * h)) < 1e-5);
        }
    }
}

TEST_CASE("advanced-to-early diagnosis ratio matches simulated life histories")
{
    // Ratio of diagnoses between ages 55 and 65 from 1e6 simulated histories.
    const NaturalHistoryParams p = support::slow_k1();
    std::mt19937_64 rng(1234);
    double early = 0, advanced = 0;
    for (int i = 0; i < 1000000; ++i) {
        const auto h = oracle::simulate_history(p.theta, p.lambda23, p.lambda24, p.lambda35, rng);
        if (h.clinical >= 55.0 && h.clinical < 65.0) {
            (h.advanced ? advanced : early) += 1.0;
        }
    }
    const IntensityMatrix q = build_intensity(p);
    const TransitionMatrix lo = transition_matrix(q, 55.0), hi = transition_matrix(q, 65.0);
    const double m4 = hi(0, 3) - lo(0, 3), m5 = hi(0, 4) - lo(0, 4);
    const double ratio = advanced / early;
    // Delta-method standard error of a ratio of two Poisson-like counts.
    const double se = ratio * std::sqrt(1.0 / advanced + 1.0 / early);
    CHECK(std::fabs(ratio - m5 / m4) < 3.0 * se);
}

TEST_CASE("cumulative onset and diagnosis at birth are zero")
{
    CHECK(cumulative_onset(support::toy_k1(), 0.0) == 0.0);
    CHECK(cumulative_diagnosis(support::toy_k1(), 0.0) == 0.0);
    CHECK(cumulative_diagnosis(support::toy_k1(), 30.0) <= cumulative_onset(support::toy_k1(), 30.0));
}

TEST_CASE("bundled lung fits reproduce the reference early-stage mean sojourn times")
{
    CHECK(emst(lung_fixture("lung_omst2_lmst0.5")) == doctest::Approx(1.67).epsilon(0.05 / 1.67));
    CHECK(emst(lung_fixture("lung_omst2_lmst1.0")) == doctest::Approx(1.34).epsilon(0.05 / 1.34));
    CHECK(emst(lung_fixture("lung_omst4_lmst0.5")) == doctest::Approx(3.67).epsilon(0.05 / 3.67));
    CHECK(emst(lung_fixture("lung_omst4_lmst1.0")) == doctest::Approx(3.34).epsilon(0.05 / 3.34));
}

TEST_CASE("bundled lung fits against reference cumulative incidence (5% relative)")
{
    const auto fast = lung_fixture("lung_omst2_lmst0.5");
    const auto slow = lung_fixture("lung_omst4_lmst0.5");
    CHECK(1e5 * cumulative_onset(fast, 70.0) == doctest::Approx(3058).epsilon(0.05));
    CHECK(1e5 * cumulative_onset(slow, 80.0) == doctest::Approx(7740).epsilon(0.05));
    CHECK(1e5 * cumulative_diagnosis(fast, 80.0) == doctest::Approx(5952).epsilon(0.05));
}

TEST_CASE("cumulative diagnosis at ages 50-80 barely depends on the sojourn hypothesis")
{
    const std::array<const char*, 4> names{"lung_omst2_lmst0.5", "lung_omst2_lmst1.0", "lung_omst4_lmst0.5",
                                           "lung_omst4_lmst1.0"};
    for (double age : {50.0, 60.0, 70.0, 80.0}) {
        double lo = HUGE_VAL, hi = 0.0;
        for (const char* n : names) {
            const double c = cumulative_diagnosis(lung_fixture(n), age);
            lo             = std::min(lo, c);
            hi             = std::max(hi, c);
        }
        CAPTURE(age);
        CHECK((hi - lo) / lo < 0.02);
    }
}
