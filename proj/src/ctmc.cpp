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
#include "stageshift/ctmc.hpp"
#include "stageshift/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace stageshift
{

StateSpace::StateSpace(int onset_phases)
    : m_k(onset_phases)
{
    if (onset_phases < 1) {
        throw InvalidParameter("onset dimension k must be >= 1, got " + std::to_string(onset_phases));
    }
    if (onset_phases + 4 > max_latent_dimension) {
        throw InvalidParameter("latent dimension k + 4 = " + std::to_string(onset_phases + 4) +
                               " exceeds the limit of " + std::to_string(max_latent_dimension));
    }
}

int StateSpace::onset_phase(int phase) const
{
    if (phase < 0 || phase >= m_k) {
        throw InvalidArgument("onset phase " + std::to_string(phase) + " out of range");
    }
    return phase;
}

ObservedState StateSpace::observed(int latent) const
{
    if (!contains(latent)) {
        throw InvalidArgument("latent state " + std::to_string(latent) + " out of range");
    }
    if (latent < m_k) {
        return ObservedState::NoCancer;
    }
    return static_cast<ObservedState>(latent - m_k + 2);
}

IntensityMatrix::IntensityMatrix(StateSpace space, Eigen::MatrixXd rates)
    : m_space(space)
    , m_rates(std::move(rates))
{
    const int d = m_space.dimension();
    if (m_rates.rows() != d || m_rates.cols() != d) {
        throw InvalidParameter("intensity matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    }
    const int k = m_space.onset_phases();
    auto allowed = [&](int i, int j) {
        if (i < k) {
            return j == i + 1;
        }
        if (i == m_space.early_preclinical()) {
            return j == m_space.advanced_preclinical() || j == m_space.early_clinical();
        }
        if (i == m_space.advanced_preclinical()) {
            return j == m_space.advanced_clinical();
        }
        return false;
    };
    for (int i = 0; i < d; ++i) {
        double off = 0.0;
        for (int j = 0; j < d; ++j) {
            if (i == j) {
                continue;
            }
            const double r = m_rates(i, j);
            if (!std::isfinite(r) || r < 0.0 || (r != 0.0 && !allowed(i, j))) {
                throw InvalidParameter("intensity entry (" + std::to_string(i) + "," + std::to_string(j) +
                                       ") violates the progressive structure");
            }
            off += r;
        }
        if (std::abs(m_rates(i, i) + off) > 1e-12 * std::max(1.0, off)) {
            throw InvalidParameter("intensity row " + std::to_string(i) + " does not sum to zero");
        }
    }
}

IntensityMatrix build_intensity(const NaturalHistoryParams& params)
{
    params.validate();
    StateSpace space(params.onset_phases());
    const int k = space.onset_phases();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(space.dimension(), space.dimension());
    for (int i = 0; i < k; ++i) {
        q(i, i)     = -params.theta[i];
        q(i, i + 1) = params.theta[i];
    }
    const int s2 = space.early_preclinical();
    const int s3 = space.advanced_preclinical();
    q(s2, s2)                        = -(params.lambda23 + params.lambda24);
    q(s2, s3)                        = params.lambda23;
    q(s2, space.early_clinical())    = params.lambda24;
    q(s3, s3)                        = -params.lambda35;
    q(s3, space.advanced_clinical()) = params.lambda35;
    return IntensityMatrix(space, std::move(q));
}

TransitionMatrix transition_matrix(const IntensityMatrix& intensity, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("elapsed time must be finite and >= 0, got " + std::to_string(t));
    }
    const int d = intensity.space().dimension();
    if (t == 0.0) {
        return TransitionMatrix(0.0, Eigen::MatrixXd::Identity(d, d));
    }
    Eigen::MatrixXd p = (intensity.rates() * t).exp();
    for (int i = 0; i < d; ++i) {
        // entries below the upper-triangular pattern are exactly zero
        for (int j = 0; j < i; ++j) {
            p(i, j) = 0.0;
        }
        for (int j = i; j < d; ++j) {
            p(i, j) = std::clamp(p(i, j), 0.0, 1.0);
        }
        const double sum = p.row(i).sum();
        const double dev = std::abs(sum - 1.0);
        if (!(dev <= stochastic_error_tolerance)) {
            throw NumericalError("transition matrix row " + std::to_string(i) + " sums to " +
                                 std::to_string(sum) + " at t=" + std::to_string(t));
        }
        if (dev > stochastic_tolerance) {
            p.row(i) /= sum;
        }
    }
    return TransitionMatrix(t, std::move(p));
}

double transition_density(const IntensityMatrix& intensity, const TransitionMatrix& p, int from, int to)
{
    const StateSpace& space = intensity.space();
    if (!space.contains(from) || !space.contains(to)) {
        throw InvalidArgument("transition_density: state index out of range");
    }
    double f = 0.0;
    for (int l = 0; l < space.dimension(); ++l) {
        if (l != to) {
            f += p(from, l) * intensity(l, to);
        }
    }
    return f;
}

double transition_density(const IntensityMatrix& intensity, double t, int from, int to)
{
    const StateSpace& space = intensity.space();
    if (!space.contains(from) || !space.contains(to)) {
        throw InvalidArgument("transition_density: state index out of range");
    }
    return transition_density(intensity, transition_matrix(intensity, t), from, to);
}

ExponentialDerivative exp_with_derivative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& direction)
{
    const Eigen::Index d = a.rows();
    Eigen::MatrixXd block             = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    block.topLeftCorner(d, d)         = a;
    block.topRightCorner(d, d)        = direction;
    block.bottomRightCorner(d, d)     = a;
    const Eigen::MatrixXd e           = block.exp();
    return {e.topLeftCorner(d, d), e.topRightCorner(d, d)};
}

} // namespace stageshift
