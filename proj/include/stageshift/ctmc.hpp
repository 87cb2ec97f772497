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
#ifndef STAGESHIFT_CTMC_HPP
#define STAGESHIFT_CTMC_HPP

#include "stageshift/params.hpp"

#include <Eigen/Dense>

namespace stageshift
{

/// Latent dimension cap (k + 4 <= 64).
inline constexpr int max_latent_dimension = 64;

/// Row-sum deviation that is silently renormalized; beyond `stochastic_error_tolerance` we throw.
inline constexpr double stochastic_tolerance       = 1e-10;
inline constexpr double stochastic_error_tolerance = 1e-8;

/// Observable disease states W; the integer values are the labels used in the literature.
enum class ObservedState : int
{
    NoCancer            = 1,
    EarlyPreclinical    = 2,
    AdvancedPreclinical = 3,
    EarlyClinical       = 4,
    AdvancedClinical    = 5,
};

/**
 * Index map of the latent chain X: onset phases 1_1..1_k occupy 0..k-1, followed by
 * the early preclinical (k), advanced preclinical (k+1), early clinical (k+2)
 * and advanced clinical (k+3) states.
 */
class StateSpace
{
public:
    explicit StateSpace(int onset_phases);

    int onset_phases() const noexcept
    {
        return m_k;
    }
    int dimension() const noexcept
    {
        return m_k + 4;
    }

    int onset_phase(int phase) const;
    int early_preclinical() const noexcept
    {
        return m_k;
    }
    int advanced_preclinical() const noexcept
    {
        return m_k + 1;
    }
    int early_clinical() const noexcept
    {
        return m_k + 2;
    }
    int advanced_clinical() const noexcept
    {
        return m_k + 3;
    }

    bool contains(int latent) const noexcept
    {
        return latent >= 0 && latent < dimension();
    }

    ObservedState observed(int latent) const;

    bool operator==(const StateSpace&) const = default;

private:
    int m_k;
};

/// Generator of the latent chain. Construction checks the block structure and zero row sums.
class IntensityMatrix
{
public:
    IntensityMatrix(StateSpace space, Eigen::MatrixXd rates);

    const StateSpace& space() const noexcept
    {
        return m_space;
    }
    const Eigen::MatrixXd& rates() const noexcept
    {
        return m_rates;
    }
    double operator()(int from, int to) const
    {
        return m_rates(from, to);
    }

private:
    StateSpace m_space;
    Eigen::MatrixXd m_rates;
};

/// P(t) = exp(Lambda t); rows are probability vectors.
class TransitionMatrix
{
public:
    TransitionMatrix(double elapsed, Eigen::MatrixXd probabilities)
        : m_elapsed(elapsed)
        , m_probabilities(std::move(probabilities))
    {
    }

    double elapsed() const noexcept
    {
        return m_elapsed;
    }
    const Eigen::MatrixXd& probabilities() const noexcept
    {
        return m_probabilities;
    }
    double operator()(int from, int to) const
    {
        return m_probabilities(from, to);
    }

private:
    double m_elapsed;
    Eigen::MatrixXd m_probabilities;
};

IntensityMatrix build_intensity(const NaturalHistoryParams& params);

/// Throws InvalidArgument for t < 0 and NumericalError if a row sum drifts past 1e-8.
TransitionMatrix transition_matrix(const IntensityMatrix& intensity, double t);

/**
 * Density of entering `to` at elapsed time t given the chain is in `from` at time 0:
 * sum over l != to of P_{from,l}(t) * lambda_{l,to}.
 */
double transition_density(const IntensityMatrix& intensity, double t, int from, int to);
double transition_density(const IntensityMatrix& intensity, const TransitionMatrix& p, int from, int to);

/// exp(A) together with the Frechet derivative L(A, E), from the 2d block exponential.
struct ExponentialDerivative {
    Eigen::MatrixXd value;
    Eigen::MatrixXd derivative;
};
ExponentialDerivative exp_with_derivative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& direction);

} // namespace stageshift

#endif // STAGESHIFT_CTMC_HPP
