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
#include "stageshift/likelihood.hpp"
#include "stageshift/ctmc.hpp"
#include "stageshift/errors.hpp"
#include "stageshift/natural_history.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace stageshift
{

namespace
{

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_factorial(std::int64_t n)
{
    return std::lgamma(static_cast<double>(n) + 1.0);
}

} // namespace

std::string_view to_string(LoglikConvention convention)
{
    return convention == LoglikConvention::Full ? "full" : "factorial_free";
}

ExpectedCounts expected_counts(const NaturalHistoryParams& params, const IncidenceTable& table)
{
    const std::vector<double> ages = table.midpoints();
    const HazardCurve h            = hazards(params, ages);
    ExpectedCounts m;
    m.early.reserve(ages.size());
    m.advanced.reserve(ages.size());
    for (std::size_t i = 0; i < ages.size(); ++i) {
        if (!h.computable[i]) {
            throw NumericalError("hazard not computable at age " + std::to_string(ages[i]) +
                                 " (survival below 1e-12)");
        }
        const double py = table.rows()[i].person_years;
        m.early.push_back(py * h.early[i]);
        m.advanced.push_back(py * h.advanced[i]);
    }
    return m;
}

double poisson_log_pmf(std::int64_t observed, double mean, LoglikConvention convention)
{
    if (observed < 0) {
        throw InvalidArgument("Poisson count must be >= 0");
    }
    double value = 0.0;
    if (observed > 0) {
        if (!(mean > 0.0)) {
            return neg_inf;
        }
        value = static_cast<double>(observed) * std::log(mean) - mean;
    }
    else {
        value = -std::max(mean, 0.0);
    }
    if (convention == LoglikConvention::Full) {
        value -= log_factorial(observed);
    }
    return value;
}

double poisson_loglik(const ExpectedCounts& expected, const IncidenceTable& table, LoglikConvention convention)
{
    const auto& rows = table.rows();
    if (expected.early.size() != rows.size() || expected.advanced.size() != rows.size()) {
        throw InvalidArgument("expected counts do not match the incidence table");
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ll += poisson_log_pmf(rows[i].early_count, expected.early[i], convention);
        ll += poisson_log_pmf(rows[i].advanced_count, expected.advanced[i], convention);
    }
    return ll;
}

double poisson_loglik(const NaturalHistoryParams& params, const IncidenceTable& table, LoglikConvention convention)
{
    return poisson_loglik(expected_counts(params, table), table, convention);
}

double saturated_loglik(const IncidenceTable& table, LoglikConvention convention)
{
    double ll = 0.0;
    for (const auto& r : table.rows()) {
        ll += poisson_log_pmf(r.early_count, static_cast<double>(r.early_count), convention);
        ll += poisson_log_pmf(r.advanced_count, static_cast<double>(r.advanced_count), convention);
    }
    return ll;
}

double deviance(const ExpectedCounts& expected, const IncidenceTable& table)
{
    return 2.0 * (saturated_loglik(table, LoglikConvention::FactorialFree) -
                  poisson_loglik(expected, table, LoglikConvention::FactorialFree));
}

LikelihoodEvaluator::LikelihoodEvaluator(const IncidenceTable& table, const SojournHypothesis& hypothesis)
    : m_hypothesis(hypothesis)
    , m_ages(table.midpoints())
{
    m_hypothesis.validate();
    for (const auto& r : table.rows()) {
        m_person_years.push_back(r.person_years);
        m_early.push_back(r.early_count);
        m_advanced.push_back(r.advanced_count);
    }
}

double LikelihoodEvaluator::loglik(const NaturalHistoryParams& params) const
{
    return evaluate(params, nullptr);
}

double LikelihoodEvaluator::loglik_and_gradient(const NaturalHistoryParams& params,
                                                std::vector<double>& gradient) const
{
    return evaluate(params, &gradient);
}

double LikelihoodEvaluator::evaluate(const NaturalHistoryParams& params, std::vector<double>* gradient) const
{
    const IntensityMatrix q = build_intensity(params);
    const StateSpace& space = q.space();
    const int k             = space.onset_phases();
    const int d             = space.dimension();
    const int s2 = space.early_preclinical(), s3 = space.advanced_preclinical();
    const int s4 = space.early_clinical(), s5 = space.advanced_clinical();
    const int n_par = k + 1;

    // d lambda24 / d lambda23 under the OMST closure
    const double dl24 = 1.0 / (params.lambda35 * m_hypothesis.omst) - 1.0;

    std::vector<Eigen::MatrixXd> directions;
    if (gradient) {
        gradient->assign(n_par, 0.0);
        for (int i = 0; i < k; ++i) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
            e(i, i)           = -1.0;
            e(i, i + 1)       = 1.0;
            directions.push_back(std::move(e));
        }
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
        e(s2, s2)         = -(1.0 + dl24);
        e(s2, s3)         = 1.0;
        e(s2, s4)         = dl24;
        directions.push_back(std::move(e));
    }

    struct Step {
        Eigen::MatrixXd p;
        std::vector<Eigen::MatrixXd> dp;
    };
    std::map<double, Step> steps;
    auto step_for = [&](double dt) -> const Step& {
        auto it = steps.find(dt);
        if (it != steps.end()) {
            return it->second;
        }
        Step s;
        if (gradient) {
            for (const auto& e : directions) {
                auto ed = exp_with_derivative(q.rates() * dt, e * dt);
                if (s.dp.empty()) {
                    s.p = std::move(ed.value);
                }
                s.dp.push_back(std::move(ed.derivative));
            }
        }
        else {
            s.p = transition_matrix(q, dt).probabilities();
        }
        return steps.emplace(dt, std::move(s)).first->second;
    };

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d);
    row(0)                 = 1.0;
    Eigen::MatrixXd drow   = Eigen::MatrixXd::Zero(gradient ? n_par : 0, d);
    double previous_age    = 0.0;
    double ll              = 0.0;

    for (std::size_t a = 0; a < m_ages.size(); ++a) {
        const double dt = m_ages[a] - previous_age;
        previous_age    = m_ages[a];
        if (dt > 0.0) {
            const Step& s = step_for(dt);
            if (gradient) {
                drow = drow * s.p;
                for (int j = 0; j < n_par; ++j) {
                    drow.row(j) += row * s.dp[j];
                }
            }
            row = row * s.p;
        }

        const double survival = 1.0 - row(s4) - row(s5);
        if (!(survival >= min_survival)) {
            return neg_inf;
        }
        const double py = m_person_years[a];
        const double m4 = py * row(s2) * params.lambda24 / survival;
        const double m5 = py * row(s3) * params.lambda35 / survival;
        const auto o4   = m_early[a];
        const auto o5   = m_advanced[a];
        const double c4 = poisson_log_pmf(o4, m4, LoglikConvention::FactorialFree);
        const double c5 = poisson_log_pmf(o5, m5, LoglikConvention::FactorialFree);
        if (!std::isfinite(c4) || !std::isfinite(c5)) {
            return neg_inf;
        }
        ll += c4 + c5;

        if (gradient) {
            const double w4 = o4 > 0 ? static_cast<double>(o4) / m4 - 1.0 : -1.0;
            const double w5 = o5 > 0 ? static_cast<double>(o5) / m5 - 1.0 : -1.0;
            for (int j = 0; j < n_par; ++j) {
                const double dsurv = -(drow(j, s4) + drow(j, s5));
                const double dl24j = (j == k) ? dl24 : 0.0;
                const double dm4 =
                    py * ((drow(j, s2) * params.lambda24 + row(s2) * dl24j) / survival -
                          row(s2) * params.lambda24 * dsurv / (survival * survival));
                const double dm5 = py * (drow(j, s3) * params.lambda35 / survival -
                                         row(s3) * params.lambda35 * dsurv / (survival * survival));
                (*gradient)[j] += w4 * dm4 + w5 * dm5;
            }
        }
    }
    return ll;
}

LoglikGradient poisson_loglik_gradient(const NaturalHistoryParams& params, const SojournHypothesis& hypothesis,
                                       const IncidenceTable& table, LoglikConvention convention)
{
    LikelihoodEvaluator eval(table, hypothesis);
    std::vector<double> g;
    LoglikGradient out;
    out.loglik = eval.loglik_and_gradient(params, g);
    if (convention == LoglikConvention::Full) {
        for (const auto& r : table.rows()) {
            out.loglik -= log_factorial(r.early_count) + log_factorial(r.advanced_count);
        }
    }
    out.theta.assign(g.begin(), g.end() - 1);
    out.lambda23 = g.back();
    return out;
}

} // namespace stageshift
