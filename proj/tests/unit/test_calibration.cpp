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
#include "support.hpp"

#include "stageshift/calibration.hpp"
#include "stageshift/errors.hpp"
#include "stageshift/incidence.hpp"
#include "stageshift/natural_history.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <random>

using namespace stageshift;

namespace
{

IncidenceTable empty_grid(double person_years)
{
    std::vector<IncidenceRow> rows;
    for (int lo = 0; lo < 90; lo += 5) {
        rows.push_back({static_cast<double>(lo), lo < 85 ? std::optional<double>(lo + 5) : std::nullopt, 0, 0,
                        person_years});
    }
    return IncidenceTable(rows);
}

/// Poisson draws around the model's expected counts.
IncidenceTable synthetic(const NaturalHistoryParams& p, double person_years, std::uint64_t seed)
{
    const IncidenceTable grid = empty_grid(person_years);
    const ExpectedCounts m    = expected_counts(p, grid);
    std::mt19937_64 rng(seed);
    std::vector<IncidenceRow> rows = grid.rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].early_count    = std::poisson_distribution<std::int64_t>(m.early[i])(rng);
        rows[i].advanced_count = std::poisson_distribution<std::int64_t>(m.advanced[i])(rng);
    }
    return IncidenceTable(rows);
}

IncidenceTable lung()
{
    return load_incidence_file(support::data_dir / "incidence" / "lung.csv");
}

} // namespace

TEST_CASE("free-parameter map round-trips interior points")
{
    const SojournHypothesis h{3.0, 1.0};
    const FreeParameterMap map(3, h);
    CHECK(map.size() == 4);
    const auto p = NaturalHistoryParams::from_hypothesis({0.02, 0.3, 4.0}, 0.3, h);
    const std::vector<double> x = map.to_free(p);
    const NaturalHistoryParams back = map.to_params(x.data());
    for (int j = 0; j < 3; ++j) {
        CHECK(back.theta[j] == doctest::Approx(p.theta[j]).epsilon(1e-12));
    }
    CHECK(back.lambda23 == doctest::Approx(p.lambda23).epsilon(1e-12));
    CHECK(omst(back) == doctest::Approx(3.0).epsilon(1e-12));
    const std::vector<double> extreme{1e3, -1e3, 0.0, 50.0};
    const NaturalHistoryParams edge = map.to_params(extreme.data());
    CHECK(edge.theta[0] <= 10.0);
    CHECK(edge.theta[1] >= 1e-6);
    CHECK(edge.lambda23 < h.lambda23_upper_bound());
    CHECK(edge.lambda24 > 0.0);
}

TEST_CASE("fit configuration is validated")
{
    FitConfig c;
    c.hypothesis = {3.0, 1.0};
    CHECK_NOTHROW(c.validate());
    c.optimizer.multistart = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c.optimizer.multistart = 1;
    c.risk_inflation       = -1.0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c.risk_inflation = 0.0;
    CHECK_NOTHROW(c.validate());
    c.hypothesis = {1.0, 2.0};
    CHECK_THROWS(c.validate());
}

TEST_CASE("an all-zero table gives a degenerate fit")
{
    FitConfig c;
    c.k          = 2;
    c.hypothesis = {3.0, 1.0};
    const FitResult r = fit(empty_grid(1e6), c);
    CHECK(r.degenerate);
    // Only the slowest phase matters here, so check the onset probability instead of each rate.
    CHECK(cumulative_onset(r.params, 85.0) < 1e-3);
    CHECK(std::accumulate(r.predicted.early.begin(), r.predicted.early.end(), 0.0) < 1.0);
}

TEST_CASE("fit results are internally consistent")
{
    const SojournHypothesis h{3.0, 1.0};
    const auto truth       = NaturalHistoryParams::from_hypothesis({0.04, 0.05}, 0.3, h);
    const IncidenceTable t = synthetic(truth, 1e6, 5);
    FitConfig c;
    c.k               = 2;
    c.hypothesis      = h;
    const FitResult r = fit(t, c);
    CHECK(r.converged);
    CHECK(r.loglik == doctest::Approx(poisson_loglik(r.params, t)).epsilon(1e-12));
    CHECK(r.deviance == doctest::Approx(deviance(expected_counts(r.params, t), t)).epsilon(1e-12));
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(r.predicted.early[i] > 0.0);
        CHECK(r.predicted.advanced[i] > 0.0);
    }
    CHECK(omst(r.params) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lmst(r.params) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fits do not change when counts and person-years are scaled together")
{
    const SojournHypothesis h{3.0, 1.0};
    const auto truth       = NaturalHistoryParams::from_hypothesis({0.03, 0.05}, 0.3, h);
    const IncidenceTable t = synthetic(truth, 1e6, 9);
    std::vector<IncidenceRow> rows = t.rows();
    for (auto& r : rows) {
        r.early_count *= 10;
        r.advanced_count *= 10;
        r.person_years *= 10;
    }
    FitConfig c;
    c.k                = 2;
    c.hypothesis       = h;
    const FitResult a  = fit(t, c);
    const FitResult b  = fit(IncidenceTable(rows), c);
    CHECK(emst(b.params) == doctest::Approx(emst(a.params)).epsilon(1e-4));
    CHECK(b.params.lambda23 == doctest::Approx(a.params.lambda23).epsilon(1e-4));
    const double onset_a = cumulative_onset(a.params, 70.0), onset_b = cumulative_onset(b.params, 70.0);
    CHECK(onset_b == doctest::Approx(onset_a).epsilon(1e-4));
}

TEST_CASE("synthetic k = 3 data are recovered")
{
    const SojournHypothesis h{3.0, 1.0};
    const auto truth       = NaturalHistoryParams::from_hypothesis({0.02, 0.03, 0.05}, 0.3, h);
    const IncidenceTable t = synthetic(truth, 5e7, 42);
    FitConfig c;
    c.k               = 3;
    c.hypothesis      = h;
    const FitResult r = fit(t, c);
    CHECK(r.converged);
    CHECK(std::fabs(emst(r.params) / emst(truth) - 1.0) < 0.03);
    CHECK(std::fabs(r.params.lambda23 / truth.lambda23 - 1.0) < 0.05);
}

TEST_CASE("onset-dimension selection")
{
    const SojournHypothesis h{3.0, 1.0};
    OptimizerSettings quick;
    quick.multistart = 4;

    SUBCASE("k = 1 data select k = 1")
    {
        const auto truth        = NaturalHistoryParams::from_hypothesis({0.004}, 0.3, h);
        const OnsetSelection s  = select_onset_dimension(synthetic(truth, 1e7, 3), h, 4, {}, quick);
        CHECK(s.chosen_k == 1);
    }
    SUBCASE("zero thresholds run to k_max with a non-increasing deviance trace")
    {
        const auto truth       = NaturalHistoryParams::from_hypothesis({0.02, 0.03, 0.05}, 0.3, h);
        const OnsetSelection s = select_onset_dimension(synthetic(truth, 5e7, 42), h, 5, {0.0, 0.0}, quick);
        CHECK(s.chosen_k == 5);
        REQUIRE(s.trace.size() == 5);
        for (std::size_t i = 1; i < s.trace.size(); ++i) {
            CAPTURE(i);
            CHECK(s.trace[i].deviance <= s.trace[i - 1].deviance * (1.0 + 1e-6));
        }
    }
    SUBCASE("lung-like data give a non-increasing trace")
    {
        const OnsetSelection s = select_onset_dimension(lung(), {4.0, 1.4}, 14, {}, quick, 3.0);
        MESSAGE("lung selection chose k = " << s.chosen_k);
        for (std::size_t i = 1; i < s.trace.size(); ++i) {
            CAPTURE(i);
            CHECK(s.trace[i].deviance <= s.trace[i - 1].deviance * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("lung fits under the reference hypotheses")
{
    FitConfig c;
    c.k = 11;

    SUBCASE("x3 risk, OMST 4, LMST 1.4 implies EMST near 3.1")
    {
        c.hypothesis     = {4.0, 1.4};
        c.risk_inflation = 3.0;
        CHECK(emst(fit(lung(), c).params) == doctest::Approx(3.1).epsilon(0.1 / 3.1));
    }
    SUBCASE("early-stage mean sojourn times")
    {
        const std::array<std::array<double, 3>, 4> table{{{2.0, 0.5, 1.67}, {2.0, 1.0, 1.34}, {4.0, 0.5, 3.67},
                                                          {4.0, 1.0, 3.34}}};
        for (const auto& [o, l, e] : table) {
            c.hypothesis = {o, l};
            CAPTURE(o);
            CAPTURE(l);
            CHECK(std::fabs(emst(fit(lung(), c).params) - e) < 0.05);
        }
    }
}

TEST_CASE("refits under the four reference hypotheses predict near-identical incidence")
{
    const IncidenceTable t = lung();
    std::vector<ExpectedCounts> predicted;
    for (const auto& h : {SojournHypothesis{2.0, 0.5}, SojournHypothesis{2.0, 1.0}, SojournHypothesis{4.0, 0.5},
                          SojournHypothesis{4.0, 1.0}}) {
        FitConfig c;
        c.k          = 11;
        c.hypothesis = h;
        predicted.push_back(fit(t, c).predicted);
    }
    double worst      = 0.0;
    double worst_age  = 0.0;
    const auto ages   = t.midpoints();
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (int stage = 0; stage < 2; ++stage) {
            double lo = HUGE_VAL, hi = 0.0;
            for (const auto& m : predicted) {
                const double v = stage == 0 ? m.early[i] : m.advanced[i];
                lo             = std::min(lo, v);
                hi             = std::max(hi, v);
            }
            if ((hi - lo) / lo > worst) {
                worst     = (hi - lo) / lo;
                worst_age = ages[i];
            }
        }
    }
    MESSAGE("largest relative discrepancy " << worst << " at age " << worst_age);
    CHECK(worst < 0.05);
}
