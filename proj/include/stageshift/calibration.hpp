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
#ifndef STAGESHIFT_CALIBRATION_HPP
#define STAGESHIFT_CALIBRATION_HPP

#include "stageshift/errors.hpp"
#include "stageshift/incidence.hpp"
#include "stageshift/likelihood.hpp"
#include "stageshift/params.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace stageshift
{

/// Box for each onset-phase rate (per year).
struct OnsetRateBounds {
    double lower = 1e-6;
    double upper = 10.0;
};

struct OptimizerSettings {
    int max_iters             = 1000;
    double gradient_tolerance = 1e-8; ///< on the count-normalized objective in the unconstrained coordinates
    int multistart            = 8;
    std::uint64_t seed        = 1;
    int threads               = 0; ///< 0 = hardware concurrency
};

struct FitConfig {
    int k = 1;
    SojournHypothesis hypothesis;
    double risk_inflation = 1.0;
    OptimizerSettings optimizer;
    OnsetRateBounds bounds;
    /// Extra start tried before the low-discrepancy points; lambda35/lambda24 are re-derived from the hypothesis.
    std::optional<NaturalHistoryParams> warm_start;

    /// Throws InvalidParameter / ConstraintViolation for unusable settings.
    void validate() const;
};

/**
 * Smooth bijection between (theta, lambda23) and unconstrained coordinates:
 * each theta is a logistic in log-space over the rate box, lambda23 a logistic on
 * (0, upper bound of the hypothesis).
 */
class FreeParameterMap
{
public:
    FreeParameterMap(int k, const SojournHypothesis& hypothesis, OnsetRateBounds bounds = {});

    int size() const noexcept
    {
        return m_k + 1;
    }

    NaturalHistoryParams to_params(const double* x) const;
    /// Values outside the open box are pulled just inside it.
    std::vector<double> to_free(const NaturalHistoryParams& params) const;
    /// Converts d/d(theta, lambda23) into d/dx in place.
    void chain_rule(const double* x, std::vector<double>& gradient) const;

private:
    int m_k;
    SojournHypothesis m_hypothesis;
    OnsetRateBounds m_bounds;
    double m_log_lo;
    double m_log_hi;
    double m_lambda23_hi;
};

struct FitResult {
    NaturalHistoryParams params;
    SojournHypothesis hypothesis;
    int k = 0;
    double loglik = 0.0; ///< poisson_loglik(params, data) under `convention`
    LoglikConvention convention = LoglikConvention::Full;
    double deviance             = 0.0;
    bool converged              = false;
    int iterations              = 0;
    double gradient_norm        = 0.0;
    /// All onset rates pushed to the lower bound (e.g. an all-zero table).
    bool degenerate  = false;
    int start_index  = 0;
    double risk_inflation = 1.0;
    ExpectedCounts predicted;
};

/// Every start failed to produce a finite likelihood. Carries the best point seen, if any.
class NonConvergence : public NumericalError
{
public:
    NonConvergence(const std::string& what, std::optional<FitResult> best)
        : NumericalError(what)
        , m_best(std::move(best))
    {
    }
    const std::optional<FitResult>& best() const noexcept
    {
        return m_best;
    }

private:
    std::optional<FitResult> m_best;
};

/**
 * Maximum-likelihood estimate of theta and lambda23 under the hypothesis in `config`.
 * Counts are first multiplied by risk_inflation. Starts run concurrently and the best
 * log-likelihood wins, ties going to the lowest start index.
 */
FitResult fit(const IncidenceTable& table, const FitConfig& config);

struct OnsetSelectionSettings {
    /// Improvement is negligible when below max(relative * deviance(k-1), absolute).
    double relative_threshold = 0.005;
    double absolute_threshold = 3.84;
    /// The added phase starts near `bounds.upper`, where it contributes almost no delay, so each
    /// k + 1 fit starts from (nearly) the k optimum. A wide upper bound keeps the fits nested.
    OnsetRateBounds bounds{1e-6, 1e6};
};

struct OnsetSelection {
    int chosen_k = 1;
    std::vector<FitResult> trace; ///< one fit per k = 1..(last k tried)
};

/**
 * Fits k = 1, 2, ... warm-starting each k from k - 1, and stops at the first k whose
 * deviance improvement is negligible; that k - 1 is chosen. Returns k_max if no step
 * is negligible.
 */
OnsetSelection select_onset_dimension(const IncidenceTable& table, const SojournHypothesis& hypothesis, int k_max,
                                      const OnsetSelectionSettings& selection = {},
                                      const OptimizerSettings& optimizer = {}, double risk_inflation = 1.0);

} // namespace stageshift

#endif // STAGESHIFT_CALIBRATION_HPP
