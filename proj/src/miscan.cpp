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
#include "stageshift/miscan.hpp"
#include "stageshift/csv.hpp"
#include "stageshift/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace stageshift
{

namespace
{

constexpr double sum_tolerance = 0.02;

std::size_t find_index(const std::vector<std::string>& names, const std::string& name, std::string_view what)
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw InvalidArgument(std::string(what) + " '" + name + "' not found");
    }
    return static_cast<std::size_t>(it - names.begin());
}

std::vector<double> parse_histology_values(const csv::Record& r, std::size_t first, std::size_t count,
                                           double scale)
{
    std::vector<double> v;
    for (std::size_t h = 0; h < count; ++h) {
        v.push_back(csv::parse_double(r.fields[first + h], r.line, "value") * scale);
    }
    return v;
}

std::vector<std::string> histology_columns(const csv::Document& doc, std::size_t first)
{
    if (doc.header.size() <= first) {
        throw ParseError("table has no histology columns", 1);
    }
    return {doc.header.begin() + static_cast<std::ptrdiff_t>(first), doc.header.end()};
}

void require_header(const csv::Document& doc, const std::vector<std::string>& fixed)
{
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (i >= doc.header.size() || doc.header[i] != fixed[i]) {
            throw ParseError("expected column '" + fixed[i] + "' at position " + std::to_string(i + 1), 1);
        }
    }
}

StageGroup parse_group(const csv::Record& r, const std::string& text)
{
    if (text == "early") {
        return StageGroup::Early;
    }
    if (text == "advanced") {
        return StageGroup::Advanced;
    }
    throw ParseError("stage_group must be 'early' or 'advanced', got '" + text + "'", r.line);
}

} // namespace

std::vector<double> StageHistologyWeights::normalized_column(StageGroup group, std::size_t histology) const
{
    const std::size_t offset = group == StageGroup::Early ? 0 : early_stages.size();
    const std::size_t count  = stages(group).size();
    std::vector<double> col;
    for (std::size_t i = 0; i < count; ++i) {
        col.push_back(proportions.at(offset + i).at(histology));
    }
    const double total = std::accumulate(col.begin(), col.end(), 0.0);
    if (!(total > 0.0)) {
        throw InvalidParameter("stage proportions for " + histologies.at(histology) + " sum to zero");
    }
    for (double& c : col) {
        c /= total;
    }
    return col;
}

void StageHistologyWeights::validate() const
{
    if (histologies.empty() || shares.size() != histologies.size()) {
        throw InvalidParameter("histology shares do not match the histology list");
    }
    if (proportions.size() != early_stages.size() + advanced_stages.size()) {
        throw InvalidParameter("stage proportion rows do not match the stage lists");
    }
    for (double s : shares) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw InvalidParameter("histology shares must lie in [0, 1]");
        }
    }
    if (std::abs(std::accumulate(shares.begin(), shares.end(), 0.0) - 1.0) > sum_tolerance) {
        throw InvalidParameter("histology shares must sum to 1");
    }
    for (StageGroup g : {StageGroup::Early, StageGroup::Advanced}) {
        const std::size_t offset = g == StageGroup::Early ? 0 : early_stages.size();
        for (std::size_t h = 0; h < histologies.size(); ++h) {
            double total = 0.0;
            for (std::size_t i = 0; i < stages(g).size(); ++i) {
                const double p = proportions[offset + i].at(h);
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw InvalidParameter("stage proportions must lie in [0, 1]");
                }
                total += p;
            }
            if (std::abs(total - 1.0) > sum_tolerance) {
                throw InvalidParameter("stage proportions for " + histologies[h] + " (" +
                                       (g == StageGroup::Early ? "early" : "advanced") + ") sum to " +
                                       std::to_string(total));
            }
        }
    }
}

double SensitivityTable::at(const std::string& stage, const std::string& histology) const
{
    auto s = std::find(stages.begin(), stages.end(), stage);
    auto h = std::find(histologies.begin(), histologies.end(), histology);
    if (s == stages.end() || h == histologies.end()) {
        throw InvalidArgument("missing sensitivity cell for test '" + test + "', stage " + stage + ", histology " +
                              histology);
    }
    return values[static_cast<std::size_t>(s - stages.begin())][static_cast<std::size_t>(h - histologies.begin())];
}

std::vector<double> stage_weighted_sensitivity(const SensitivityTable& table, const StageHistologyWeights& weights,
                                               StageGroup group)
{
    weights.validate();
    const auto& stages = weights.stages(group);
    std::vector<double> out;
    for (std::size_t h = 0; h < weights.histologies.size(); ++h) {
        const std::vector<double> w = weights.normalized_column(group, h);
        double mean                 = 0.0;
        for (std::size_t i = 0; i < stages.size(); ++i) {
            mean += w[i] * table.at(stages[i], weights.histologies[h]);
        }
        out.push_back(mean);
    }
    return out;
}

double weighted_sensitivity(const SensitivityTable& table, const StageHistologyWeights& weights, StageGroup group)
{
    const std::vector<double> by_histology = stage_weighted_sensitivity(table, weights, group);
    const double total_share = std::accumulate(weights.shares.begin(), weights.shares.end(), 0.0);
    double mean              = 0.0;
    for (std::size_t h = 0; h < by_histology.size(); ++h) {
        mean += weights.shares[h] / total_share * by_histology[h];
    }
    return mean;
}

std::size_t StageChain::index(const std::string& stage) const
{
    return find_index(stages, stage, "stage");
}

void StageChain::validate() const
{
    if (stages.empty() || mst.size() != stages.size() || transition.size() + 1 != stages.size()) {
        throw InvalidParameter("stage chain for " + histology + " is incomplete");
    }
    for (double m : mst) {
        if (!(m > 0.0)) {
            throw InvalidParameter("mean sojourn times must be > 0 (" + histology + ")");
        }
    }
    for (double p : transition) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidParameter("transition probabilities must lie in [0, 1] (" + histology + ")");
        }
    }
    index(first_advanced);
}

double chain_reach_probability(const StageChain& chain, const std::string& from, const std::string& to)
{
    const std::size_t i = chain.index(from), j = chain.index(to);
    if (j < i) {
        throw InvalidArgument("stage " + to + " is upstream of " + from);
    }
    double p = 1.0;
    for (std::size_t s = i; s < j; ++s) {
        p *= chain.transition[s];
    }
    return p;
}

SojournInputs derive_sojourn_inputs(const StageChain& chain)
{
    chain.validate();
    const std::size_t adv = chain.index(chain.first_advanced);
    SojournInputs out;
    double reach = 1.0;
    for (std::size_t s = 0; s < chain.stages.size(); ++s) {
        out.omst += reach * chain.mst[s];
        if (s < adv) {
            out.emst += reach * chain.mst[s];
        }
        if (s + 1 < chain.stages.size()) {
            reach *= chain.transition[s];
        }
    }
    reach = 1.0;
    for (std::size_t s = adv; s < chain.stages.size(); ++s) {
        out.lmst += reach * chain.mst[s];
        if (s + 1 < chain.stages.size()) {
            reach *= chain.transition[s];
        }
    }
    return out;
}

DerivedSojourn derive_sojourn_inputs(const std::vector<StageChain>& chains, const std::vector<std::string>& histologies,
                                     const std::vector<double>& shares)
{
    if (histologies.size() != shares.size() || histologies.empty()) {
        throw InvalidParameter("histology shares do not match the histology list");
    }
    const double total = std::accumulate(shares.begin(), shares.end(), 0.0);
    DerivedSojourn out;
    out.histologies = histologies;
    for (std::size_t h = 0; h < histologies.size(); ++h) {
        auto it = std::find_if(chains.begin(), chains.end(),
                               [&](const StageChain& c) { return c.histology == histologies[h]; });
        if (it == chains.end()) {
            throw InvalidArgument("no stage chain for histology '" + histologies[h] + "'");
        }
        const SojournInputs s = derive_sojourn_inputs(*it);
        out.by_histology.push_back(s);
        const double w = shares[h] / total;
        out.weighted.omst += w * s.omst;
        out.weighted.emst += w * s.emst;
        out.weighted.lmst += w * s.lmst;
    }
    return out;
}

StageChain average_sexes(const StageChain& men, const StageChain& women, double male_share)
{
    if (!(male_share >= 0.0 && male_share <= 1.0)) {
        throw InvalidParameter("male share must lie in [0, 1]");
    }
    if (men.stages != women.stages || men.transition != women.transition) {
        throw InvalidParameter("sex-specific chains must share stages and transition probabilities");
    }
    StageChain out = men;
    for (std::size_t s = 0; s < out.mst.size(); ++s) {
        out.mst[s] = male_share * men.mst[s] + (1.0 - male_share) * women.mst[s];
    }
    return out;
}

StageHistologyWeights load_stage_weights(std::istream& in)
{
    const csv::Document doc = csv::read(in);
    require_header(doc, {"stage_group", "stage"});
    StageHistologyWeights w;
    w.histologies = histology_columns(doc, 2);
    std::vector<std::vector<double>> early, advanced;
    bool have_shares = false;
    for (const auto& r : doc.records) {
        const std::vector<double> v = parse_histology_values(r, 2, w.histologies.size(), 1.0);
        if (r.fields[0] == "share") {
            w.shares    = v;
            have_shares = true;
        }
        else if (parse_group(r, r.fields[0]) == StageGroup::Early) {
            w.early_stages.push_back(r.fields[1]);
            early.push_back(v);
        }
        else {
            w.advanced_stages.push_back(r.fields[1]);
            advanced.push_back(v);
        }
    }
    if (!have_shares) {
        throw ParseError("proportions table has no 'share' row");
    }
    w.proportions = early;
    w.proportions.insert(w.proportions.end(), advanced.begin(), advanced.end());
    w.validate();
    return w;
}

std::vector<SensitivityTable> load_sensitivities(std::istream& in)
{
    const csv::Document doc = csv::read(in);
    require_header(doc, {"test", "stage_group", "stage"});
    const std::vector<std::string> histologies = histology_columns(doc, 3);
    std::vector<SensitivityTable> tables;
    for (const auto& r : doc.records) {
        parse_group(r, r.fields[1]);
        auto it = std::find_if(tables.begin(), tables.end(),
                               [&](const SensitivityTable& t) { return t.test == r.fields[0]; });
        if (it == tables.end()) {
            tables.push_back({r.fields[0], histologies, {}, {}});
            it = tables.end() - 1;
        }
        if (std::find(it->stages.begin(), it->stages.end(), r.fields[2]) != it->stages.end()) {
            throw ParseError("duplicate stage " + r.fields[2] + " for test " + r.fields[0], r.line);
        }
        std::vector<double> v = parse_histology_values(r, 3, histologies.size(), 0.01);
        for (double s : v) {
            if (!(s >= 0.0 && s <= 1.0)) {
                throw ParseError("sensitivity must lie in [0, 100] percent", r.line);
            }
        }
        it->stages.push_back(r.fields[2]);
        it->values.push_back(std::move(v));
    }
    return tables;
}

std::vector<StageChain> load_stage_chains(std::istream& sojourn_times, std::istream& transitions,
                                          const std::string& first_advanced)
{
    const csv::Document mst = csv::read(sojourn_times);
    require_header(mst, {"stage"});
    const std::vector<std::string> histologies = histology_columns(mst, 1);
    const csv::Document tr = csv::read(transitions);
    require_header(tr, {"from", "to"});
    if (histology_columns(tr, 2) != histologies) {
        throw ParseError("transition table histology columns differ from the sojourn-time table", 1);
    }

    std::vector<StageChain> chains(histologies.size());
    for (std::size_t h = 0; h < histologies.size(); ++h) {
        chains[h].histology = histologies[h];
    }
    for (const auto& r : mst.records) {
        const std::vector<double> v = parse_histology_values(r, 1, histologies.size(), 1.0);
        for (std::size_t h = 0; h < histologies.size(); ++h) {
            chains[h].stages.push_back(r.fields[0]);
            chains[h].mst.push_back(v[h]);
        }
    }
    if (mst.records.empty()) {
        throw ParseError("sojourn-time table is empty");
    }
    const std::vector<std::string>& stages = chains.front().stages;
    if (tr.records.size() + 1 != stages.size()) {
        throw ParseError("transition table needs one row per successive stage pair");
    }
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
        const auto& r = tr.records[i];
        if (r.fields[0] != stages[i] || r.fields[1] != stages[i + 1]) {
            throw ParseError("expected transition " + stages[i] + " -> " + stages[i + 1], r.line);
        }
        const std::vector<double> v = parse_histology_values(r, 2, histologies.size(), 1.0);
        for (std::size_t h = 0; h < histologies.size(); ++h) {
            chains[h].transition.push_back(v[h]);
        }
    }
    for (auto& c : chains) {
        c.first_advanced = first_advanced;
        c.validate();
    }
    return chains;
}

} // namespace stageshift
