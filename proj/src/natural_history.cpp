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
#include "stageshift/natural_history.hpp"
#include "stageshift/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace stageshift
{

namespace
{

bool positive_finite(double x)
{
    return std::isfinite(x) && x > 0.0;
}

void check_age(double age)
{
    if (!(age >= 0.0) || !std::isfinite(age)) {
        throw InvalidArgument("age must be finite and >= 0, got " + std::to_string(age));
    }
}

} // namespace

void SojournHypothesis::validate() const
{
    if (!positive_finite(omst) || !positive_finite(lmst)) {
        throw InvalidParameter("sojourn hypothesis requires OMST > 0 and LMST > 0");
    }
    if (!(lmst < omst)) {
        std::ostringstream msg;
        msg << "sojourn hypothesis requires LMST < OMST (got OMST=" << omst << ", LMST=" << lmst << ")";
        throw InvalidParameter(msg.str());
    }
}

double SojournHypothesis::lambda23_upper_bound() const
{
    validate();
    const double l35 = lambda35();
    return l35 / (l35 * omst - 1.0);
}

NaturalHistoryParams NaturalHistoryParams::from_hypothesis(std::vector<double> theta, double lambda23,
                                                           const SojournHypothesis& hypothesis)
{
    NaturalHistoryParams p;
    p.theta    = std::move(theta);
    p.lambda23 = lambda23;
    p.lambda24 = lambda24_from_hypothesis(hypothesis, lambda23);
    p.lambda35 = hypothesis.lambda35();
    p.validate();
    return p;
}

void NaturalHistoryParams::validate() const
{
    if (theta.empty()) {
        throw InvalidParameter("onset rate vector theta must be non-empty");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!positive_finite(theta[i])) {
            throw InvalidParameter("onset rate theta[" + std::to_string(i) + "] must be > 0");
        }
    }
    if (!positive_finite(lambda23)) {
        throw InvalidParameter("lambda23 must be > 0");
    }
    if (!positive_finite(lambda24)) {
        throw InvalidParameter("lambda24 must be > 0");
    }
    if (!positive_finite(lambda35)) {
        throw InvalidParameter("lambda35 must be > 0");
    }
}

double lambda24_from_hypothesis(const SojournHypothesis& hypothesis, double lambda23)
{
    const double upper = hypothesis.lambda23_upper_bound();
    if (!(lambda23 > 0.0 && lambda23 < upper)) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "lambda23=" << lambda23 << " violates 0 < lambda23 < lambda35/(lambda35*OMST-1) = " << upper;
        throw ConstraintViolation(msg.str());
    }
    const double l35 = hypothesis.lambda35();
    return (l35 + lambda23) / (l35 * hypothesis.omst) - lambda23;
}

double emst(const NaturalHistoryParams& params)
{
    params.validate();
    return 1.0 / (params.lambda23 + params.lambda24);
}

double omst(const NaturalHistoryParams& params)
{
    params.validate();
    const double exit = params.lambda23 + params.lambda24;
    return 1.0 / exit + (params.lambda23 / exit) / params.lambda35;
}

double lmst(const NaturalHistoryParams& params)
{
    params.validate();
    return 1.0 / params.lambda35;
}

HazardCurve hazards(const NaturalHistoryParams& params, std::span<const double> ages)
{
    const IntensityMatrix q  = build_intensity(params);
    const StateSpace& space  = q.space();
    const int early_clinical = space.early_clinical();
    const int adv_clinical   = space.advanced_clinical();

    HazardCurve curve;
    curve.ages.assign(ages.begin(), ages.end());
    curve.early.reserve(ages.size());
    curve.advanced.reserve(ages.size());
    curve.computable.reserve(ages.size());
    for (std::size_t i = 0; i < ages.size(); ++i) {
        check_age(ages[i]);
        if (i > 0 && !(ages[i] > ages[i - 1])) {
            throw InvalidArgument("hazard ages must be strictly increasing");
        }
        const TransitionMatrix p = transition_matrix(q, ages[i]);
        const double survival    = 1.0 - (p(0, early_clinical) + p(0, adv_clinical));
        if (survival < min_survival) {
            curve.early.push_back(std::numeric_limits<double>::quiet_NaN());
            curve.advanced.push_back(std::numeric_limits<double>::quiet_NaN());
            curve.computable.push_back(false);
            continue;
        }
        curve.early.push_back(transition_density(q, p, 0, early_clinical) / survival);
        curve.advanced.push_back(transition_density(q, p, 0, adv_clinical) / survival);
        curve.computable.push_back(true);
    }
    return curve;
}

double cumulative_onset(const NaturalHistoryParams& params, double age)
{
    check_age(age);
    const IntensityMatrix q  = build_intensity(params);
    const TransitionMatrix p = transition_matrix(q, age);
    double healthy           = 0.0;
    for (int j = 0; j < q.space().onset_phases(); ++j) {
        healthy += p(0, j);
    }
    return std::max(0.0, 1.0 - healthy);
}

double cumulative_diagnosis(const NaturalHistoryParams& params, double age)
{
    check_age(age);
    const IntensityMatrix q  = build_intensity(params);
    const TransitionMatrix p = transition_matrix(q, age);
    return p(0, q.space().early_clinical()) + p(0, q.space().advanced_clinical());
}

} // namespace stageshift
