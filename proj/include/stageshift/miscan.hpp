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
#ifndef STAGESHIFT_MISCAN_HPP
#define STAGESHIFT_MISCAN_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace stageshift
{

enum class StageGroup
{
    Early,
    Advanced,
};

/**
 * Histology shares plus the within-group distribution of diagnoses over stages
 * for each histology (one column per histology).
 */
struct StageHistologyWeights {
    std::vector<std::string> histologies;
    std::vector<double> shares;
    std::vector<std::string> early_stages;
    std::vector<std::string> advanced_stages;
    /// proportions[i][h]: stage i of early_stages followed by advanced_stages, histology h.
    std::vector<std::vector<double>> proportions;

    const std::vector<std::string>& stages(StageGroup group) const
    {
        return group == StageGroup::Early ? early_stages : advanced_stages;
    }
    /// Proportion column for one group and histology, renormalized to sum to 1.
    std::vector<double> normalized_column(StageGroup group, std::size_t histology) const;

    /// Shares and every proportion column must sum to 1 within 0.02.
    void validate() const;
};

/// Per-stage, per-histology test sensitivities (probabilities) for one test.
struct SensitivityTable {
    std::string test;
    std::vector<std::string> histologies;
    std::vector<std::string> stages;
    std::vector<std::vector<double>> values; ///< values[stage][histology]

    /// Throws InvalidArgument naming the stage and histology if the cell is missing.
    double at(const std::string& stage, const std::string& histology) const;
};

/// Within each histology, weighted across the group's stages.
std::vector<double> stage_weighted_sensitivity(const SensitivityTable& table, const StageHistologyWeights& weights,
                                               StageGroup group);

/// Stage-weighted means combined across histologies by their shares.
double weighted_sensitivity(const SensitivityTable& table, const StageHistologyWeights& weights, StageGroup group);

/// Successive preclinical stages of one histology with mean sojourn times and onward transition probabilities.
struct StageChain {
    std::string histology;
    std::vector<std::string> stages;
    std::vector<double> mst;        ///< years, one per stage
    std::vector<double> transition; ///< transition[i] = P(stage i -> stage i+1)
    std::string first_advanced = "IIIA";

    std::size_t index(const std::string& stage) const;
    void validate() const;
};

/// Product of successive transition probabilities from `from` to `to`; 1 when equal.
double chain_reach_probability(const StageChain& chain, const std::string& from, const std::string& to);

struct SojournInputs {
    double omst = 0.0;
    double emst = 0.0;
    double lmst = 0.0;
};

/**
 * OMST and EMST are occupancy-weighted sums of stage MSTs conditional on starting in the
 * first stage; LMST is the same sum over the advanced stages conditional on entering
 * the first advanced stage.
 */
SojournInputs derive_sojourn_inputs(const StageChain& chain);

struct DerivedSojourn {
    std::vector<std::string> histologies;
    std::vector<SojournInputs> by_histology;
    SojournInputs weighted;
};

/// Per-histology inputs and their share-weighted mean; shares follow `histologies` order.
DerivedSojourn derive_sojourn_inputs(const std::vector<StageChain>& chains, const std::vector<std::string>& histologies,
                                     const std::vector<double>& shares);

/// Stage-wise MST average of two sex-specific chains (men weighted by male_share).
StageChain average_sexes(const StageChain& men, const StageChain& women, double male_share = 0.59);

/**
 * Table readers. Layouts (histology names are free-form column headers that must agree across files):
 *  - proportions: stage_group,stage,<histologies...>; one row with stage_group "share" holds histology shares
 *  - sensitivities: test,stage_group,stage,<histologies...>; values in percent
 *  - sojourn times: stage,<histologies...>
 *  - transitions: from,to,<histologies...>
 */
StageHistologyWeights load_stage_weights(std::istream& in);
std::vector<SensitivityTable> load_sensitivities(std::istream& in);
std::vector<StageChain> load_stage_chains(std::istream& sojourn_times, std::istream& transitions,
                                          const std::string& first_advanced = "IIIA");

} // namespace stageshift

#endif // STAGESHIFT_MISCAN_HPP
