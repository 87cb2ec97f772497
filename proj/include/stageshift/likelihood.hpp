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
#ifndef STAGESHIFT_LIKELIHOOD_HPP
#define STAGESHIFT_LIKELIHOOD_HPP

#include "stageshift/incidence.hpp"
#include "stageshift/params.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace stageshift
{

/// Whether ln(o!) is included in Poisson log-likelihood values.
enum class LoglikConvention
{
    Full,          ///< sum of o ln M - M - ln o!
    FactorialFree, ///< sum of o ln M - M
};

std::string_view to_string(LoglikConvention convention);

/// Per-cell Poisson means M_a4 (early) and M_a5 (advanced).
struct ExpectedCounts {
    std::vector<double> early;
    std::vector<double> advanced;
};

/// M_ak = person_years * h_k(midpoint). Throws NumericalError where the hazard is non-computable.
ExpectedCounts expected_counts(const NaturalHistoryParams& params, const IncidenceTable& table);

/// Log pmf of a Poisson count; -infinity when mean <= 0 and observed > 0.
double poisson_log_pmf(std::int64_t observed, double mean, LoglikConvention convention = LoglikConvention::Full);

double poisson_loglik(const ExpectedCounts& expected, const IncidenceTable& table,
                      LoglikConvention convention = LoglikConvention::Full);
double poisson_loglik(const NaturalHistoryParams& params, const IncidenceTable& table,
                      LoglikConvention convention = LoglikConvention::Full);

/// Log-likelihood of the saturated model (M = o in every cell).
double saturated_loglik(const IncidenceTable& table, LoglikConvention convention = LoglikConvention::Full);

/// 2 * (saturated - model) log-likelihood.
double deviance(const ExpectedCounts& expected, const IncidenceTable& table);

/**
 * Fast likelihood and analytic gradient for fitting under a fixed sojourn hypothesis.
 *
 * Free parameters are (theta_1..theta_k, lambda23); lambda35 = 1/LMST and lambda24 follows
 * the OMST closure, so the lambda23 derivative is the total derivative. Row 1_1 of P(a) is
 * propagated across the sorted midpoints with one exponential per distinct age step, and the
 * derivatives come from Frechet derivatives of those step exponentials.
 */
class LikelihoodEvaluator
{
public:
    LikelihoodEvaluator(const IncidenceTable& table, const SojournHypothesis& hypothesis);

    /// Factorial-free log-likelihood; -infinity for rejected points.
    double loglik(const NaturalHistoryParams& params) const;

    /// As loglik(); fills `gradient` (size k + 1) with d/dtheta_i and d/dlambda23.
    double loglik_and_gradient(const NaturalHistoryParams& params, std::vector<double>& gradient) const;

    const SojournHypothesis& hypothesis() const noexcept
    {
        return m_hypothesis;
    }

private:
    double evaluate(const NaturalHistoryParams& params, std::vector<double>* gradient) const;

    SojournHypothesis m_hypothesis;
    std::vector<double> m_ages;
    std::vector<double> m_person_years;
    std::vector<std::int64_t> m_early;
    std::vector<std::int64_t> m_advanced;
};

/// Log-likelihood (given convention) and gradient w.r.t. (theta, lambda23) with lambda24 tied to the hypothesis.
struct LoglikGradient {
    double loglik = 0.0;
    std::vector<double> theta;
    double lambda23 = 0.0;
};

LoglikGradient poisson_loglik_gradient(const NaturalHistoryParams& params, const SojournHypothesis& hypothesis,
                                       const IncidenceTable& table,
                                       LoglikConvention convention = LoglikConvention::Full);

} // namespace stageshift

#endif // STAGESHIFT_LIKELIHOOD_HPP
