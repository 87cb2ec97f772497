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
#include "stageshift/calibration.hpp"
#include "stageshift/natural_history.hpp"
#include "parallel.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace stageshift
{

namespace
{

double logistic(double x)
{
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double logit(double p)
{
    return std::log(p / (1.0 - p));
}

// Keeps starting points away from the saturated ends of the logistic.
constexpr double edge = 1e-3;

double radical_inverse(std::uint64_t index, unsigned base)
{
    double result = 0.0;
    double f      = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

unsigned nth_prime(int n)
{
    static const unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                      59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131,
                                      137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
                                      227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};
    return primes[n % std::size(primes)];
}

class NegativeLoglik final : public ceres::FirstOrderFunction
{
public:
    NegativeLoglik(const LikelihoodEvaluator& eval, const FreeParameterMap& map, double scale)
        : m_eval(eval)
        , m_map(map)
        , m_scale(scale)
    {
    }

    bool Evaluate(const double* x, double* cost, double* gradient) const override
    {
        try {
            const NaturalHistoryParams p = m_map.to_params(x);
            double ll                    = 0.0;
            if (gradient) {
                std::vector<double> g;
                ll = m_eval.loglik_and_gradient(p, g);
                if (!std::isfinite(ll)) {
                    return false;
                }
                m_map.chain_rule(x, g);
                for (int i = 0; i < m_map.size(); ++i) {
                    gradient[i] = -g[i] / m_scale;
                    if (!std::isfinite(gradient[i])) {
                        return false;
                    }
                }
            }
            else {
                ll = m_eval.loglik(p);
            }
            if (!std::isfinite(ll)) {
                return false;
            }
            *cost = -ll / m_scale;
            return true;
        }
        catch (const Error&) {
            return false;
        }
    }

    int NumParameters() const override
    {
        return m_map.size();
    }

private:
    const LikelihoodEvaluator& m_eval;
    const FreeParameterMap& m_map;
    double m_scale;
};

struct StartOutcome {
    bool finite = false;
    std::vector<double> x;
    double loglik = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    double gradient_norm = std::numeric_limits<double>::infinity();
};

std::vector<std::vector<double>> starting_points(const FitConfig& config, const FreeParameterMap& map)
{
    const int k = config.k;
    std::vector<std::vector<double>> starts;
    if (config.warm_start) {
        NaturalHistoryParams ws = *config.warm_start;
        starts.push_back(map.to_free(ws));
    }
    const double upper   = config.hypothesis.lambda23_upper_bound();
    const double theta0  = std::clamp(k / 150.0, config.bounds.lower * 10.0, config.bounds.upper / 10.0);
    const std::uint64_t offset = config.optimizer.seed * 1009u;
    for (int s = 0; s < config.optimizer.multistart; ++s) {
        NaturalHistoryParams p;
        const std::uint64_t index = offset + static_cast<std::uint64_t>(s) + 1;
        for (int i = 0; i < k; ++i) {
            const double h = radical_inverse(index, nth_prime(i));
            p.theta.push_back(theta0 * std::exp(2.0 * (h - 0.5)));
        }
        const double h = radical_inverse(index, nth_prime(k));
        p.lambda23     = upper * (0.1 + 0.8 * h);
        starts.push_back(map.to_free(p));
    }
    return starts;
}

StartOutcome run_start(const LikelihoodEvaluator& eval, const FreeParameterMap& map, double scale,
                       std::vector<double> x, const OptimizerSettings& settings)
{
    StartOutcome out;
    NegativeLoglik objective(eval, map, scale);
    double cost = 0.0;
    if (!objective.Evaluate(x.data(), &cost, nullptr)) {
        return out;
    }

    ceres::GradientProblem problem(new NegativeLoglik(eval, map, scale));
    ceres::GradientProblemSolver::Options options;
    options.line_search_direction_type = ceres::LBFGS;
    options.max_num_iterations         = settings.max_iters;
    options.gradient_tolerance         = settings.gradient_tolerance;
    options.function_tolerance         = 1e-14;
    options.parameter_tolerance        = 1e-12;
    options.logging_type               = ceres::SILENT;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(options, problem, x.data(), &summary);

    std::vector<double> g(map.size());
    if (!objective.Evaluate(x.data(), &cost, g.data())) {
        return out;
    }
    out.finite        = true;
    out.x             = std::move(x);
    out.loglik        = -cost * scale;
    out.converged     = summary.termination_type == ceres::CONVERGENCE;
    out.iterations    = static_cast<int>(summary.iterations.size());
    out.gradient_norm = 0.0;
    for (double v : g) {
        out.gradient_norm = std::max(out.gradient_norm, std::abs(v));
    }
    return out;
}

IncidenceTable prepare_data(const IncidenceTable& table, double factor)
{
    if (factor == 1.0) {
        return table;
    }
    if (factor == 0.0) {
        std::vector<IncidenceRow> rows = table.rows();
        for (auto& r : rows) {
            r.early_count    = 0;
            r.advanced_count = 0;
        }
        return IncidenceTable(std::move(rows), table.open_group_width());
    }
    return inflate_risk(table, factor);
}

} // namespace

void FitConfig::validate() const
{
    if (k < 1 || k + 4 > 64) {
        throw InvalidParameter("onset dimension k must be in [1, 60]");
    }
    hypothesis.validate();
    if (!(hypothesis.omst * hypothesis.lambda35() > 1.0)) {
        throw ConstraintViolation("hypothesis inadmissible: OMST * lambda35 must exceed 1");
    }
    if (!(risk_inflation >= 0.0) || !std::isfinite(risk_inflation)) {
        throw InvalidParameter("risk_inflation must be >= 0");
    }
    if (optimizer.multistart < 1) {
        throw InvalidParameter("multistart count must be >= 1");
    }
    if (optimizer.max_iters < 1) {
        throw InvalidParameter("max_iters must be >= 1");
    }
    if (!(optimizer.gradient_tolerance > 0.0)) {
        throw InvalidParameter("gradient tolerance must be > 0");
    }
    if (!(bounds.lower > 0.0) || !(bounds.upper > bounds.lower)) {
        throw InvalidParameter("onset rate bounds must satisfy 0 < lower < upper");
    }
    if (warm_start && warm_start->onset_phases() != k) {
        throw InvalidParameter("warm start has " + std::to_string(warm_start->onset_phases()) +
                               " onset phases, expected " + std::to_string(k));
    }
}

FreeParameterMap::FreeParameterMap(int k, const SojournHypothesis& hypothesis, OnsetRateBounds bounds)
    : m_k(k)
    , m_hypothesis(hypothesis)
    , m_bounds(bounds)
    , m_log_lo(std::log(bounds.lower))
    , m_log_hi(std::log(bounds.upper))
    , m_lambda23_hi(hypothesis.lambda23_upper_bound())
{
}

NaturalHistoryParams FreeParameterMap::to_params(const double* x) const
{
    std::vector<double> theta(m_k);
    for (int i = 0; i < m_k; ++i) {
        theta[i] = std::clamp(std::exp(m_log_lo + (m_log_hi - m_log_lo) * logistic(x[i])), m_bounds.lower,
                              m_bounds.upper);
    }
    // Saturated logistic values would land on the open interval's endpoints.
    const double l23 = m_lambda23_hi * std::clamp(logistic(x[m_k]), 1e-15, 1.0 - 1e-15);
    return NaturalHistoryParams::from_hypothesis(std::move(theta), l23, m_hypothesis);
}

std::vector<double> FreeParameterMap::to_free(const NaturalHistoryParams& params) const
{
    if (params.onset_phases() != m_k) {
        throw InvalidParameter("parameter vector has the wrong onset dimension");
    }
    std::vector<double> x(m_k + 1);
    for (int i = 0; i < m_k; ++i) {
        const double u = (std::log(params.theta[i]) - m_log_lo) / (m_log_hi - m_log_lo);
        x[i]           = logit(std::clamp(u, edge, 1.0 - edge));
    }
    x[m_k] = logit(std::clamp(params.lambda23 / m_lambda23_hi, edge, 1.0 - edge));
    return x;
}

void FreeParameterMap::chain_rule(const double* x, std::vector<double>& gradient) const
{
    for (int i = 0; i < m_k; ++i) {
        const double s     = logistic(x[i]);
        const double theta = std::exp(m_log_lo + (m_log_hi - m_log_lo) * s);
        gradient[i] *= theta * (m_log_hi - m_log_lo) * s * (1.0 - s);
    }
    const double s = logistic(x[m_k]);
    gradient[m_k] *= m_lambda23_hi * s * (1.0 - s);
}

FitResult fit(const IncidenceTable& table, const FitConfig& config)
{
    config.validate();
    if (table.size() == 0) {
        throw InvalidArgument("incidence table is empty");
    }
    const IncidenceTable data = prepare_data(table, config.risk_inflation);
    const LikelihoodEvaluator eval(data, config.hypothesis);
    const FreeParameterMap map(config.k, config.hypothesis, config.bounds);
    const double scale = std::max<double>(1.0, static_cast<double>(data.total_count()));

    const auto starts = starting_points(config, map);
    std::vector<StartOutcome> outcomes(starts.size());
    detail::parallel_for(starts.size(), config.optimizer.threads, [&](std::size_t i) {
        outcomes[i] = run_start(eval, map, scale, starts[i], config.optimizer);
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].finite && (!best || outcomes[i].loglik > outcomes[*best].loglik)) {
            best = i;
        }
    }
    if (!best) {
        throw NonConvergence("all " + std::to_string(starts.size()) + " starts failed to reach a finite likelihood",
                             std::nullopt);
    }

    const StartOutcome& b = outcomes[*best];
    FitResult r;
    r.params         = map.to_params(b.x.data());
    r.hypothesis     = config.hypothesis;
    r.k              = config.k;
    r.converged      = b.converged;
    r.iterations     = b.iterations;
    r.gradient_norm  = b.gradient_norm;
    r.start_index    = static_cast<int>(*best);
    r.risk_inflation = config.risk_inflation;
    r.convention     = LoglikConvention::Full;
    try {
        r.predicted = expected_counts(r.params, data);
        r.loglik    = poisson_loglik(r.predicted, data, r.convention);
        r.deviance  = deviance(r.predicted, data);
    }
    catch (const NumericalError& e) {
        throw NonConvergence(std::string("best start is not evaluable: ") + e.what(), r);
    }

    const double log_lo = std::log(config.bounds.lower);
    const double log_hi = std::log(config.bounds.upper);
    r.degenerate        = std::all_of(r.params.theta.begin(), r.params.theta.end(), [&](double t) {
        return (std::log(t) - log_lo) / (log_hi - log_lo) < 0.05;
    });
    if (data.total_count() == 0) {
        r.degenerate = true;
    }
    return r;
}

OnsetSelection select_onset_dimension(const IncidenceTable& table, const SojournHypothesis& hypothesis, int k_max,
                                      const OnsetSelectionSettings& selection, const OptimizerSettings& optimizer,
                                      double risk_inflation)
{
    if (k_max < 1) {
        throw InvalidParameter("k_max must be >= 1");
    }
    if (selection.relative_threshold < 0.0 || selection.absolute_threshold < 0.0) {
        throw InvalidParameter("selection thresholds must be >= 0");
    }
    OnsetSelection out;
    out.chosen_k = k_max;
    FitConfig config;
    config.hypothesis     = hypothesis;
    config.risk_inflation = risk_inflation;
    config.optimizer      = optimizer;
    config.bounds         = selection.bounds;
    for (int k = 1; k <= k_max; ++k) {
        config.k = k;
        if (!out.trace.empty()) {
            NaturalHistoryParams ws = out.trace.back().params;
            ws.theta.push_back(config.bounds.upper);
            config.warm_start = ws;
        }
        out.trace.push_back(fit(table, config));
        if (k > 1) {
            const double previous    = out.trace[k - 2].deviance;
            const double improvement = previous - out.trace[k - 1].deviance;
            const double threshold =
                std::max(selection.relative_threshold * previous, selection.absolute_threshold);
            if (improvement < threshold) {
                out.chosen_k = k - 1;
                break;
            }
        }
    }
    return out;
}

} // namespace stageshift
