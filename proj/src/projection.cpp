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
#include "stageshift/projection.hpp"
#include "stageshift/errors.hpp"
#include "stageshift/natural_history.hpp"
#include "parallel.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace stageshift
{

namespace
{

constexpr int obs_none     = 0; // column index for O = 1
constexpr int obs_advanced = 2; // O = 3

void check_interval(const ScreeningProtocol& protocol, int l)
{
    if (l < 1 || l > protocol.screens()) {
        throw InvalidArgument("interval index " + std::to_string(l) + " outside 1.." +
                              std::to_string(protocol.screens()));
    }
}

double survival_at(const IntensityMatrix& q, double age)
{
    const StateSpace& s = q.space();
    if (age == 0.0) {
        return 1.0;
    }
    const TransitionMatrix p = transition_matrix(q, age);
    return 1.0 - p(0, s.early_clinical()) - p(0, s.advanced_clinical());
}

/// Transition matrices reused across equal step lengths.
class StepCache
{
public:
    explicit StepCache(const IntensityMatrix& q)
        : m_q(q)
    {
    }

    const Eigen::MatrixXd& operator()(double dt)
    {
        auto it = m_cache.find(dt);
        if (it == m_cache.end()) {
            it = m_cache.emplace(dt, transition_matrix(m_q, dt).probabilities()).first;
        }
        return it->second;
    }

private:
    const IntensityMatrix& m_q;
    std::map<double, Eigen::MatrixXd> m_cache;
};

} // namespace

void TestSensitivity::validate() const
{
    if (!(early >= 0.0 && early <= 1.0) || !(advanced >= 0.0 && advanced <= 1.0)) {
        throw InvalidParameter("test sensitivities must lie in [0, 1]");
    }
}

void ScreeningProtocol::validate() const
{
    if (screen_ages.empty()) {
        throw InvalidParameter("protocol needs at least one screen");
    }
    if (!(screen_ages.front() > 0.0)) {
        throw InvalidParameter("first screen age must be > 0");
    }
    for (std::size_t i = 1; i < screen_ages.size(); ++i) {
        if (!(screen_ages[i] > screen_ages[i - 1])) {
            throw InvalidParameter("screen ages must be strictly increasing");
        }
    }
    if (!(followup_end > screen_ages.back()) || !std::isfinite(followup_end)) {
        throw InvalidParameter("followup_end must exceed the last screen age");
    }
    sensitivity.validate();
}

double ScreeningProtocol::observation_age(int i) const
{
    if (i < 1 || i > screens() + 1) {
        throw InvalidArgument("observation index " + std::to_string(i) + " outside 1.." +
                              std::to_string(screens() + 1));
    }
    return i == screens() + 1 ? followup_end : screen_ages[i - 1];
}

EmissionMatrix::EmissionMatrix(const StateSpace& space, const TestSensitivity& sensitivity)
    : m_values(Eigen::MatrixXd::Zero(space.dimension(), 5))
{
    sensitivity.validate();
    for (int i = 0; i < space.onset_phases(); ++i) {
        m_values(i, 0) = 1.0;
    }
    m_values(space.early_preclinical(), 0)    = 1.0 - sensitivity.early;
    m_values(space.early_preclinical(), 1)    = sensitivity.early;
    m_values(space.advanced_preclinical(), 0) = 1.0 - sensitivity.advanced;
    m_values(space.advanced_preclinical(), 2) = sensitivity.advanced;
    m_values(space.early_clinical(), 3)       = 1.0;
    m_values(space.advanced_clinical(), 4)    = 1.0;
}

double EmissionMatrix::operator()(int latent, int observed) const
{
    if (latent < 0 || latent >= m_values.rows() || observed < 1 || observed > 5) {
        throw InvalidArgument("emission index out of range");
    }
    return m_values(latent, observed - 1);
}

Eigen::VectorXd initial_distribution(const NaturalHistoryParams& params, double a1)
{
    if (!(a1 > 0.0)) {
        throw InvalidArgument("entry age a1 must be > 0");
    }
    const IntensityMatrix q  = build_intensity(params);
    const StateSpace& s      = q.space();
    const TransitionMatrix p = transition_matrix(q, a1);
    const double survival    = 1.0 - p(0, s.early_clinical()) - p(0, s.advanced_clinical());
    if (!(survival >= min_survival)) {
        throw NumericalError("probability of no clinical diagnosis before a1 is below 1e-12");
    }
    Eigen::VectorXd pi = p.probabilities().row(0).transpose() / survival;
    pi(s.early_clinical())    = 0.0;
    pi(s.advanced_clinical()) = 0.0;
    return pi;
}

double sequence_probability(const NaturalHistoryParams& params, const ScreeningProtocol& protocol,
                            std::span<const int> observations)
{
    protocol.validate();
    if (observations.empty() || observations.size() > static_cast<std::size_t>(protocol.screens() + 1)) {
        throw InvalidArgument("sequence length must be in 1..n+1");
    }
    for (int o : observations) {
        if (o < 1 || o > 5) {
            throw InvalidArgument("observation values must be in 1..5");
        }
    }
    const IntensityMatrix q = build_intensity(params);
    const EmissionMatrix e(q.space(), protocol.sensitivity);
    StepCache step(q);

    Eigen::RowVectorXd alpha =
        initial_distribution(params, protocol.screen_ages.front()).transpose().cwiseProduct(
            e.values().col(observations[0] - 1).transpose());
    for (std::size_t i = 1; i < observations.size(); ++i) {
        const int idx   = static_cast<int>(i) + 1;
        const double dt = protocol.observation_age(idx) - protocol.observation_age(idx - 1);
        alpha           = (alpha * step(dt)).cwiseProduct(e.values().col(observations[i] - 1).transpose());
    }
    return alpha.sum();
}

double screen_detected_advanced(const NaturalHistoryParams& params, const ScreeningProtocol& protocol, int l)
{
    check_interval(protocol, l);
    std::vector<int> seq(l, 1);
    seq.back() = 3;
    return sequence_probability(params, protocol, seq);
}

double interval_clinical_advanced(const NaturalHistoryParams& params, const ScreeningProtocol& protocol, int l)
{
    check_interval(protocol, l);
    std::vector<int> seq(l + 1, 1);
    seq.back() = 5;
    return sequence_probability(params, protocol, seq);
}

double control_advanced_between(const NaturalHistoryParams& params, double a1, double lo, double hi)
{
    if (!(lo >= a1) || !(hi >= lo)) {
        throw InvalidArgument("control interval must satisfy a1 <= lo <= hi");
    }
    if (lo == hi) {
        return 0.0;
    }
    const IntensityMatrix q = build_intensity(params);
    const int s5            = q.space().advanced_clinical();
    const double survival   = survival_at(q, a1);
    if (!(survival >= min_survival)) {
        throw NumericalError("probability of no clinical diagnosis before a1 is below 1e-12");
    }
    const double p_hi = transition_matrix(q, hi)(0, s5);
    const double p_lo = lo == 0.0 ? 0.0 : transition_matrix(q, lo)(0, s5);
    return std::max(0.0, p_hi - p_lo) / survival;
}

double control_interval_advanced(const NaturalHistoryParams& params, const ScreeningProtocol& protocol, int l)
{
    protocol.validate();
    check_interval(protocol, l);
    return control_advanced_between(params, protocol.screen_ages.front(), protocol.observation_age(l),
                                    protocol.observation_age(l + 1));
}

double TrialProjection::advanced_screened() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < screen_detected.size(); ++i) {
        sum += screen_detected[i] + interval_clinical[i];
    }
    return sum;
}

double TrialProjection::advanced_control() const
{
    double sum = 0.0;
    for (double c : control) {
        sum += c;
    }
    return sum;
}

TrialProjection stage_shift(const NaturalHistoryParams& params, const ScreeningProtocol& protocol)
{
    protocol.validate();
    const IntensityMatrix q = build_intensity(params);
    const StateSpace& s     = q.space();
    const EmissionMatrix e(s, protocol.sensitivity);
    const int n  = protocol.screens();
    const int s5 = s.advanced_clinical();
    StepCache step(q);

    const double a1        = protocol.screen_ages.front();
    const Eigen::MatrixXd p_a1 = transition_matrix(q, a1).probabilities();
    const double survival  = 1.0 - p_a1(0, s.early_clinical()) - p_a1(0, s5);
    if (!(survival >= min_survival)) {
        throw NumericalError("probability of no clinical diagnosis before a1 is below 1e-12");
    }

    TrialProjection out;
    out.protocol = protocol;

    // Screened arm: predicted occupancy at a_l given O = 1 at every earlier screen.
    Eigen::RowVectorXd predicted = p_a1.row(0) / survival;
    predicted(s.early_clinical()) = 0.0;
    predicted(s5)                 = 0.0;
    // Control arm: unconditional row of P(a) from state 1_1.
    Eigen::RowVectorXd control_row = p_a1.row(0);

    for (int l = 1; l <= n; ++l) {
        const double dt = protocol.observation_age(l + 1) - protocol.observation_age(l);
        const Eigen::MatrixXd& p = step(dt);

        out.screen_detected.push_back(predicted.dot(e.values().col(obs_advanced)));
        const Eigen::RowVectorXd missed = predicted.cwiseProduct(e.values().col(obs_none).transpose());
        predicted                       = missed * p;
        out.interval_clinical.push_back(predicted(s5));

        const Eigen::RowVectorXd next_control = control_row * p;
        out.control.push_back(std::max(0.0, next_control(s5) - control_row(s5)) / survival);
        control_row = next_control;

        const double c = out.control.back();
        out.interval_shifts.push_back(c > 0.0 ? (c - out.screen_detected.back() - out.interval_clinical.back()) / c
                                              : std::numeric_limits<double>::quiet_NaN());
    }

    const double total_control = out.advanced_control();
    if (!(total_control > 0.0)) {
        throw UndefinedShift("no advanced clinical diagnoses expected in the control arm; shift undefined");
    }
    out.cumulative_shift = (total_control - out.advanced_screened()) / total_control;
    return out;
}

double relative_reduction(const TrialProjection& comparator, const TrialProjection& intervention)
{
    const double base = comparator.advanced_screened();
    if (!(base > 0.0)) {
        throw UndefinedShift("comparator arm has no advanced diagnoses");
    }
    return (base - intervention.advanced_screened()) / base;
}

std::vector<SweepRow> sweep(const std::vector<NamedParams>& models, const std::vector<NamedSchedule>& schedules,
                            const SensitivityGrid& grid, int threads)
{
    if (models.empty() || schedules.empty() || grid.early.empty() || grid.advanced.empty()) {
        throw InvalidArgument("sweep grid is empty");
    }
    std::vector<SweepRow> rows;
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t p = 0; p < schedules.size(); ++p) {
            for (double be : grid.early) {
                for (double bl : grid.advanced) {
                    SweepRow r;
                    r.model_index    = m;
                    r.schedule_index = p;
                    r.model_label    = models[m].label;
                    r.schedule_label = schedules[p].label;
                    r.sensitivity    = {be, bl};
                    rows.push_back(std::move(r));
                }
            }
        }
    }
    detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
        SweepRow& r = rows[i];
        try {
            const NamedSchedule& sch = schedules[r.schedule_index];
            const ScreeningProtocol protocol{sch.screen_ages, sch.followup_end, r.sensitivity};
            r.shift = stage_shift(models[r.model_index].params, protocol).cumulative_shift;
        }
        catch (const Error& e) {
            r.error = e.what();
        }
    });
    return rows;
}

McedProjection mced_project(const std::vector<NamedParams>& models, const ScreeningProtocol& protocol, int threads)
{
    if (models.empty()) {
        throw InvalidArgument("at least one cancer model is required");
    }
    protocol.validate();
    McedProjection out;
    out.sites.resize(models.size());
    detail::parallel_for(models.size(), threads, [&](std::size_t i) {
        out.sites[i] = {models[i].label, stage_shift(models[i].params, protocol)};
    });
    double control = 0.0, screened = 0.0;
    for (const auto& site : out.sites) {
        control += site.projection.advanced_control();
        screened += site.projection.advanced_screened();
    }
    out.pooled_shift = (control - screened) / control;
    return out;
}

} // namespace stageshift
