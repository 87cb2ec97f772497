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

#include "stageshift/ctmc.hpp"
#include "stageshift/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace stageshift;

namespace
{

std::vector<std::vector<double>> as_rows(const Eigen::MatrixXd& m)
{
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rows[i][j] = m(i, j);
        }
    }
    return rows;
}

} // namespace

TEST_CASE("intensity matrix for k = 1 transcribes the rates")
{
    const IntensityMatrix q = build_intensity(support::toy_k1());
    Eigen::MatrixXd expected(5, 5);
    expected << -0.5, 0.5, 0, 0, 0,
                0, -0.6, 0.4, 0.2, 0,
                0, 0, -2.0, 0, 2.0,
                0, 0, 0, 0, 0,
                0, 0, 0, 0, 0;
    CHECK((q.rates() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("intensity matrix for k = 2 chains the onset phases")
{
    NaturalHistoryParams p = support::toy_k1();
    p.theta                = {0.5, 0.7};
    const IntensityMatrix q = build_intensity(p);
    REQUIRE(q.rates().rows() == 6);
    CHECK(q(0, 0) == -0.5);
    CHECK(q(0, 1) == 0.5);
    CHECK(q(1, 1) == -0.7);
    CHECK(q(1, 2) == 0.7);
    CHECK(q(0, 2) == 0.0);
}

TEST_CASE("zero or negative rates are rejected")
{
    NaturalHistoryParams p = support::toy_k1();
    p.lambda24             = 0.0;
    CHECK_THROWS_AS(build_intensity(p), InvalidParameter);
    p          = support::toy_k1();
    p.theta[0] = -1.0;
    CHECK_THROWS_AS(build_intensity(p), InvalidParameter);
}

TEST_CASE("generator structure holds for random models")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int k             = 1 + trial % 6;
        const IntensityMatrix q = build_intensity(support::random_params(rng, k));
        const StateSpace& s     = q.space();
        for (int i = 0; i < s.dimension(); ++i) {
            CHECK(std::fabs(q.rates().row(i).sum()) < 1e-14);
            for (int j = 0; j < s.dimension(); ++j) {
                if (i == j) {
                    continue;
                }
                const bool allowed = (j == i + 1 && i < s.early_preclinical()) ||
                                     (i == s.early_preclinical() &&
                                      (j == s.advanced_preclinical() || j == s.early_clinical())) ||
                                     (i == s.advanced_preclinical() && j == s.advanced_clinical());
                CHECK(q(i, j) >= 0.0);
                if (!allowed) {
                    CHECK(q(i, j) == 0.0);
                }
            }
        }
        CHECK(q.rates().row(s.early_clinical()).isZero());
        CHECK(q.rates().row(s.advanced_clinical()).isZero());
    }
}

TEST_CASE("observed-state mapping")
{
    const StateSpace s(3);
    CHECK(s.dimension() == 7);
    for (int i = 0; i < 3; ++i) {
        CHECK(s.observed(i) == ObservedState::NoCancer);
    }
    CHECK(s.observed(3) == ObservedState::EarlyPreclinical);
    CHECK(s.observed(4) == ObservedState::AdvancedPreclinical);
    CHECK(s.observed(5) == ObservedState::EarlyClinical);
    CHECK(s.observed(6) == ObservedState::AdvancedClinical);
    CHECK_THROWS_AS(s.observed(7), InvalidArgument);
    CHECK_THROWS_AS(StateSpace(0), InvalidParameter);
    CHECK_THROWS_AS(StateSpace(max_latent_dimension - 3), InvalidParameter);
}

TEST_CASE("exp(0) is the identity and negative time is rejected")
{
    const IntensityMatrix q = build_intensity(support::toy_k1());
    CHECK(transition_matrix(q, 0.0).probabilities().isApprox(Eigen::MatrixXd::Identity(5, 5), 0.0));
    CHECK_THROWS_AS(transition_matrix(q, -0.1), InvalidArgument);
}

TEST_CASE("two-state chain at t = ln 2 splits evenly")
{
    // A 1-phase model with a very slow rest of the chain still has the closed form e^{-t} for row 0.
    NaturalHistoryParams p = support::toy_k1();
    p.theta                = {1.0};
    const TransitionMatrix m = transition_matrix(build_intensity(p), std::numbers::ln2);
    CHECK(m(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.probabilities().row(0).tail(4).sum() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("matrix exponential agrees with the long-double Taylor oracle")
{
    const IntensityMatrix q   = build_intensity(support::toy_k1());
    const TransitionMatrix m  = transition_matrix(q, 1.0);
    const oracle::Matrix ref = oracle::taylor_expm(as_rows(q.rates()), 1.0);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(std::fabs(m(i, j) - static_cast<double>(ref[i][j])) < 1e-8);
        }
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(0.0, 80.0);
    for (int trial = 0; trial < 20; ++trial) {
        const IntensityMatrix qr = build_intensity(support::random_params(rng, 1 + trial % 5));
        const double at          = t(rng);
        const TransitionMatrix mr  = transition_matrix(qr, at);
        const oracle::Matrix refr = oracle::taylor_expm(as_rows(qr.rates()), at);
        for (int i = 0; i < qr.space().dimension(); ++i) {
            for (int j = 0; j < qr.space().dimension(); ++j) {
                CHECK(std::fabs(mr(i, j) - static_cast<double>(refr[i][j])) < 1e-10);
            }
        }
    }
}

TEST_CASE("k = 1 occupancy of the early preclinical state has a closed form")
{
    const NaturalHistoryParams p = support::toy_k1();
    const IntensityMatrix q      = build_intensity(p);
    const double theta = p.theta[0], a = p.lambda23 + p.lambda24;
    for (double t : {0.3, 1.0, 4.0, 17.0, 60.0}) {
        const double closed = theta / (a - theta) * (std::exp(-theta * t) - std::exp(-a * t));
        CHECK(std::fabs(transition_matrix(q, t)(0, 1) - closed) < 1e-9);
    }
}

TEST_CASE("transition matrices are stochastic, upper triangular and obey Chapman-Kolmogorov")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> t(0.0, 50.0);
    for (int trial = 0; trial < 40; ++trial) {
        const IntensityMatrix q = build_intensity(support::random_params(rng, 1 + trial % 8, 0.005, 2.0));
        const double s = t(rng), u = t(rng);
        const Eigen::MatrixXd ps  = transition_matrix(q, s).probabilities();
        const Eigen::MatrixXd pu  = transition_matrix(q, u).probabilities();
        const Eigen::MatrixXd psu = transition_matrix(q, s + u).probabilities();
        CHECK((ps * pu - psu).cwiseAbs().maxCoeff() < 1e-9);
        const int d = q.space().dimension();
        for (int i = 0; i < d; ++i) {
            CHECK(std::fabs(psu.row(i).sum() - 1.0) < 1e-10);
            for (int j = 0; j < d; ++j) {
                CHECK(psu(i, j) >= 0.0);
                CHECK(psu(i, j) <= 1.0);
                if (j < i) {
                    CHECK(psu(i, j) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("transition density into the early clinical state")
{
    const NaturalHistoryParams p = support::toy_k1();
    const IntensityMatrix q      = build_intensity(p);
    CHECK(transition_density(q, 0.0, 0, 3) == 0.0);

    const double a  = p.lambda23 + p.lambda24;
    const double t  = 2.0;
    const double f4 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double u) { return p.theta[0] * std::exp(-p.theta[0] * u) * std::exp(-a * (t - u)) * p.lambda24; }, 0.0, t);
    CHECK(std::fabs(transition_density(q, t, 0, 3) - f4) < 1e-6);
    CHECK_THROWS_AS(transition_density(q, t, 0, 5), InvalidArgument);
    CHECK_THROWS_AS(transition_density(q, t, -1, 3), InvalidArgument);
}

TEST_CASE("clinical densities are the derivative of absorbed mass, which never decreases")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 15; ++trial) {
        const IntensityMatrix q = build_intensity(support::random_params(rng, 1 + trial % 4, 0.02, 1.0));
        const int s4 = q.space().early_clinical(), s5 = q.space().advanced_clinical();
        auto absorbed = [&](double t) {
            const TransitionMatrix m = transition_matrix(q, t);
            return m(0, s4) + m(0, s5);
        };
        double previous = 0.0;
        for (double t = 0.5; t < 80.0; t += 3.7) {
            const double h  = 1e-5;
            const double fd = (absorbed(t + h) - absorbed(t - h)) / (2.0 * h);
            const double f  = transition_density(q, t, 0, s4) + transition_density(q, t, 0, s5);
            CHECK(std::fabs(f - fd) < 1e-5);
            const double now = absorbed(t);
            CHECK(now >= previous - 1e-15);
            previous = now;
        }
    }
}

TEST_CASE("Frechet derivative of the exponential matches finite differences")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const IntensityMatrix q = build_intensity(support::random_params(rng, 2 + trial % 3));
        const Eigen::MatrixXd a = q.rates() * 7.5;
        Eigen::MatrixXd e       = Eigen::MatrixXd::Zero(a.rows(), a.cols());
        e(0, 0)                 = -1.0;
        e(0, 1)                 = 1.0;
        const ExponentialDerivative r = exp_with_derivative(a, e);
        const double h                = 1e-6;
        const Eigen::MatrixXd plus    = exp_with_derivative(a + h * e, e).value;
        const Eigen::MatrixXd minus   = exp_with_derivative(a - h * e, e).value;
        const Eigen::MatrixXd fd      = (plus - minus) / (2.0 * h);
        CHECK((r.derivative - fd).cwiseAbs().maxCoeff() < 1e-7);
        CHECK((r.value - transition_matrix(q, 7.5).probabilities()).cwiseAbs().maxCoeff() < 1e-12);
    }
}
