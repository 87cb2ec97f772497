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
#ifndef STAGESHIFT_PROJECTION_HPP
#define STAGESHIFT_PROJECTION_HPP

#include "stageshift/ctmc.hpp"
#include "stageshift/params.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stageshift
{

/// Per-screen probability of a positive test given early (Be) or advanced (Bl) preclinical disease.
struct TestSensitivity {
    double early    = 0.0;
    double advanced = 0.0;

    void validate() const;
    bool operator==(const TestSensitivity&) const = default;
};

/// Screens at a_1 < ... < a_n and a final follow-up at a_{n+1}.
struct ScreeningProtocol {
    std::vector<double> screen_ages;
    double followup_end = 0.0;
    TestSensitivity sensitivity;

    /// Throws InvalidParameter unless n >= 1, a_1 > 0, ages strictly increase and sensitivities are in [0, 1].
    void validate() const;

    int screens() const noexcept
    {
        return static_cast<int>(screen_ages.size());
    }

    /// Age of observation i in 1..n+1.
    double observation_age(int i) const;

    bool operator==(const ScreeningProtocol&) const = default;
};

/// P(O = s | X = r) for r over latent states and s = 1..5 (stored 0-based in columns).
class EmissionMatrix
{
public:
    EmissionMatrix(const StateSpace& space, const TestSensitivity& sensitivity);

    double operator()(int latent, int observed) const;

    const Eigen::MatrixXd& values() const noexcept
    {
        return m_values;
    }

private:
    Eigen::MatrixXd m_values;
};

/// State occupancy at a1 conditional on no clinical diagnosis before a1.
Eigen::VectorXd initial_distribution(const NaturalHistoryParams& params, double a1);

/// P(O_1 = o_1, ..., O_l = o_l) by the forward recursion; l <= n + 1, values in 1..5.
double sequence_probability(const NaturalHistoryParams& params, const ScreeningProtocol& protocol,
                            std::span<const int> observations);

/// S_D(a_l) = P(O_1 = 1, ..., O_{l-1} = 1, O_l = 3), 1 <= l <= n.
double screen_detected_advanced(const NaturalHistoryParams& params, const ScreeningProtocol& protocol, int l);

/// J_D(a_l, a_{l+1}) = P(O_1 = 1, ..., O_l = 1, O_{l+1} = 5), 1 <= l <= n.
double interval_clinical_advanced(const NaturalHistoryParams& params, const ScreeningProtocol& protocol, int l);

/// C_D[a_l, a_{l+1}): advanced clinical diagnoses in the unscreened arm, 1 <= l <= n.
double control_interval_advanced(const NaturalHistoryParams& params, const ScreeningProtocol& protocol, int l);

/// (P_{1_1,5}(hi) - P_{1_1,5}(lo)) / survival at a1; zero when lo == hi.
double control_advanced_between(const NaturalHistoryParams& params, double a1, double lo, double hi);

struct TrialProjection {
    ScreeningProtocol protocol;
    std::vector<double> screen_detected;   ///< S_D(a_l), l = 1..n
    std::vector<double> interval_clinical; ///< J_D(a_l, a_{l+1})
    std::vector<double> control;           ///< C_D[a_l, a_{l+1})
    /// (C_D - S_D - J_D) / C_D per interval; NaN where C_D = 0.
    std::vector<double> interval_shifts;
    double cumulative_shift = 0.0;

    double advanced_screened() const; ///< sum S_D + sum J_D
    double advanced_control() const;  ///< sum C_D
};

/// Throws UndefinedShift when sum C_D = 0.
TrialProjection stage_shift(const NaturalHistoryParams& params, const ScreeningProtocol& protocol);

/// (advanced_comparator - advanced_intervention) / advanced_comparator, both screened arms.
double relative_reduction(const TrialProjection& comparator, const TrialProjection& intervention);

struct NamedParams {
    std::string label;
    NaturalHistoryParams params;
};

struct NamedSchedule {
    std::string label;
    std::vector<double> screen_ages;
    double followup_end = 0.0;
};

struct SensitivityGrid {
    std::vector<double> early;
    std::vector<double> advanced;
};

struct SweepRow {
    std::size_t model_index    = 0;
    std::size_t schedule_index = 0;
    std::string model_label;
    std::string schedule_label;
    TestSensitivity sensitivity;
    std::optional<double> shift; ///< empty when the point failed
    std::string error;
};

/**
 * Cumulative shift for every (model, schedule, Be, Bl) combination, in that nesting order.
 * Failures are reported in the row. Throws InvalidArgument if any grid dimension is empty.
 */
std::vector<SweepRow> sweep(const std::vector<NamedParams>& models, const std::vector<NamedSchedule>& schedules,
                            const SensitivityGrid& grid, int threads = 0);

struct SiteProjection {
    std::string site;
    TrialProjection projection;
};

struct McedProjection {
    std::vector<SiteProjection> sites;
    /// Shift over the pooled advanced cases of all sites, treating cancers as independent.
    double pooled_shift = 0.0;
};

McedProjection mced_project(const std::vector<NamedParams>& models, const ScreeningProtocol& protocol,
                            int threads = 0);

} // namespace stageshift

#endif // STAGESHIFT_PROJECTION_HPP
