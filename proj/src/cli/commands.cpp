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
#include "cli/commands.hpp"
#include "cli/manifest.hpp"
#include "stageshift/calibration.hpp"
#include "stageshift/cohort_simulation.hpp"
#include "stageshift/errors.hpp"
#include "stageshift/incidence.hpp"
#include "stageshift/miscan.hpp"
#include "stageshift/natural_history.hpp"
#include "stageshift/projection.hpp"
#include "stageshift/serialization.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace stageshift::cli
{

namespace fs = std::filesystem;

namespace
{

std::string num(double x)
{
    if (!std::isfinite(x)) {
        return "";
    }
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
}

std::string join_ages(const std::vector<double>& ages)
{
    std::string out;
    for (std::size_t i = 0; i < ages.size(); ++i) {
        out += (i ? ";" : "") + num(ages[i]);
    }
    return out;
}

std::string quote(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

/// Config values plus the directory that relative paths are resolved against.
struct Config {
    Json json;
    fs::path base;

    fs::path path(const Json& j, const char* key) const
    {
        if (!j.contains(key) || !j.at(key).is_string()) {
            throw ParseError(std::string("config key '") + key + "' must be a path string");
        }
        const fs::path p = j.at(key).get<std::string>();
        return p.is_absolute() ? p : base / p;
    }
};

template <class T>
T get_or(const Json& j, const char* key, T fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("config key '") + key + "' has the wrong type");
    }
}

const Json& section(const Json& j, const char* key)
{
    if (!j.contains(key)) {
        throw ParseError(std::string("config is missing '") + key + "'");
    }
    return j.at(key);
}

/// Files produced by a command; nothing touches the disk until commit().
class Artifacts
{
public:
    Artifacts(fs::path dir, RunManifest& manifest)
        : m_dir(std::move(dir))
        , m_manifest(manifest)
    {
    }

    void add(const std::string& name, std::string contents)
    {
        m_files.emplace_back(name, std::move(contents));
    }

    void commit(int exit_code, const std::string& message = {})
    {
        fs::create_directories(m_dir);
        for (const auto& [name, contents] : m_files) {
            write_file_atomic(m_dir / name, contents);
            m_manifest.add_output(m_dir / name, contents);
        }
        m_manifest.set_status(exit_code, message);
        write_file_atomic(m_dir / "manifest.json", dump(m_manifest.to_json()));
    }

private:
    fs::path m_dir;
    RunManifest& m_manifest;
    std::vector<std::pair<std::string, std::string>> m_files;
};

struct FitScenario {
    std::string site;
    fs::path incidence;
    SojournHypothesis hypothesis;
    std::optional<int> k; ///< empty = automatic selection
    int k_max = 12;
    double risk_inflation = 1.0;
    OptimizerSettings optimizer;
    OnsetSelectionSettings selection;
};

FitScenario parse_fit_scenario(const Json& j, const Config& cfg, std::uint64_t seed, int threads)
{
    FitScenario s;
    s.site           = get_or<std::string>(j, "site", "site");
    s.incidence      = cfg.path(j, "incidence");
    s.hypothesis     = hypothesis_from_json(section(j, "hypothesis"));
    s.risk_inflation = get_or<double>(j, "risk_inflation", 1.0);
    if (j.contains("k") && j.at("k").is_string()) {
        if (j.at("k").get<std::string>() != "auto") {
            throw ParseError("k must be an integer or \"auto\"");
        }
    }
    else {
        s.k = get_or<int>(j, "k", 1);
    }
    s.k_max = get_or<int>(j, "k_max", 12);
    if (j.contains("optimizer")) {
        const Json& o                   = j.at("optimizer");
        s.optimizer.max_iters           = get_or<int>(o, "max_iters", s.optimizer.max_iters);
        s.optimizer.gradient_tolerance  = get_or<double>(o, "gradient_tolerance", s.optimizer.gradient_tolerance);
        s.optimizer.multistart          = get_or<int>(o, "multistart", s.optimizer.multistart);
    }
    if (j.contains("selection")) {
        const Json& o                   = j.at("selection");
        s.selection.relative_threshold  = get_or<double>(o, "relative_threshold", s.selection.relative_threshold);
        s.selection.absolute_threshold  = get_or<double>(o, "absolute_threshold", s.selection.absolute_threshold);
    }
    s.optimizer.seed    = seed;
    s.optimizer.threads = threads;
    FitConfig check;
    check.k              = s.k.value_or(1);
    check.hypothesis     = s.hypothesis;
    check.risk_inflation = s.risk_inflation;
    check.optimizer      = s.optimizer;
    check.validate();
    if (!s.k && s.k_max < 1) {
        throw InvalidParameter("k_max must be >= 1");
    }
    return s;
}

struct FitRun {
    FitResult result;
    std::vector<FitResult> trace;
};

FitRun run_fit(const FitScenario& s, const IncidenceTable& table)
{
    FitRun run;
    if (s.k) {
        FitConfig config;
        config.k              = *s.k;
        config.hypothesis     = s.hypothesis;
        config.risk_inflation = s.risk_inflation;
        config.optimizer      = s.optimizer;
        run.result            = fit(table, config);
        return run;
    }
    OnsetSelection sel = select_onset_dimension(table, s.hypothesis, s.k_max, s.selection, s.optimizer,
                                                s.risk_inflation);
    run.result = sel.trace.at(static_cast<std::size_t>(sel.chosen_k - 1));
    run.trace  = std::move(sel.trace);
    return run;
}

std::string predicted_csv(const FitResult& r, const IncidenceTable& table)
{
    const IncidenceTable data = r.risk_inflation == 1.0 ? table : inflate_risk(table, r.risk_inflation);
    const auto mids           = data.midpoints();
    std::ostringstream s;
    s << "age_lo,age_hi,midpoint,person_years,observed_early,observed_advanced,expected_early,expected_advanced,"
         "observed_rate_early,observed_rate_advanced,expected_rate_early,expected_rate_advanced\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& row = data.rows()[i];
        const double per = 1e5 / row.person_years;
        s << num(row.age_lo) << ',' << (row.age_hi ? num(*row.age_hi) : "") << ',' << num(mids[i]) << ','
          << num(row.person_years) << ',' << row.early_count << ',' << row.advanced_count << ','
          << num(r.predicted.early[i]) << ',' << num(r.predicted.advanced[i]) << ','
          << num(row.early_count * per) << ',' << num(row.advanced_count * per) << ','
          << num(r.predicted.early[i] * per) << ',' << num(r.predicted.advanced[i] * per) << '\n';
    }
    return s.str();
}

std::string cumulative_csv(const NaturalHistoryParams& p)
{
    std::ostringstream s;
    s << "age,preclinical_onset_per_100k,clinical_diagnosis_per_100k\n";
    for (int age = 0; age <= 100; age += 5) {
        s << age << ',' << num(1e5 * cumulative_onset(p, age)) << ',' << num(1e5 * cumulative_diagnosis(p, age))
          << '\n';
    }
    return s.str();
}

ScreeningProtocol protocol_entry(const Json& j, const Config& cfg, RunManifest& manifest)
{
    if (j.is_string()) {
        const fs::path p = j.get<std::string>();
        const fs::path full = p.is_absolute() ? p : cfg.base / p;
        manifest.add_input(full);
        return protocol_from_json(read_json_file(full));
    }
    return protocol_from_json(j);
}

NaturalHistoryParams params_file(const fs::path& path, RunManifest& manifest)
{
    const Json j = read_json_file(path);
    manifest.add_input(path);
    return params_from_json(j);
}

std::string projection_csv(const TrialProjection& p)
{
    std::ostringstream s;
    s << "interval,age_lo,age_hi,screen_detected,interval_clinical,control,interval_shift\n";
    for (int l = 1; l <= p.protocol.screens(); ++l) {
        const std::size_t i = static_cast<std::size_t>(l - 1);
        s << l << ',' << num(p.protocol.observation_age(l)) << ',' << num(p.protocol.observation_age(l + 1)) << ','
          << num(p.screen_detected[i]) << ',' << num(p.interval_clinical[i]) << ',' << num(p.control[i]) << ','
          << num(p.interval_shifts[i]) << '\n';
    }
    return s.str();
}

// ---- commands ----

int cmd_fit(const Config& cfg, std::uint64_t seed, const RunOptions& opt, RunManifest& manifest)
{
    const FitScenario s = parse_fit_scenario(cfg.json, cfg, seed, opt.threads);
    const IncidenceTable table = load_incidence_file(s.incidence);
    manifest.add_input(s.incidence);

    Artifacts out(opt.out_dir, manifest);
    FitRun run;
    try {
        run = run_fit(s, table);
    }
    catch (const NonConvergence& e) {
        Json diag{{"site", s.site}, {"converged", false}, {"message", e.what()}};
        if (e.best()) {
            diag.update(fit_diagnostics(*e.best()));
            diag["converged"] = false;
        }
        out.add("diagnostics.json", dump(diag));
        out.commit(exit_non_convergence, e.what());
        throw;
    }

    Json diag    = fit_diagnostics(run.result);
    diag["site"] = s.site;
    out.add("params.json", dump(to_json(run.result.params)));
    out.add("diagnostics.json", dump(diag));
    out.add("predicted.csv", predicted_csv(run.result, table));
    out.add("cumulative.csv", cumulative_csv(run.result.params));
    if (!run.trace.empty()) {
        std::ostringstream t;
        t << "k,deviance,loglik,converged,emst\n";
        for (const auto& f : run.trace) {
            t << f.k << ',' << num(f.deviance) << ',' << num(f.loglik) << ',' << (f.converged ? 1 : 0) << ','
              << num(emst(f.params)) << '\n';
        }
        out.add("selection.csv", t.str());
    }
    if (!run.result.converged) {
        out.commit(exit_non_convergence, "optimizer stopped before meeting its convergence criteria");
        return exit_non_convergence;
    }
    out.commit(exit_ok);
    return exit_ok;
}

int cmd_project(const Config& cfg, const RunOptions& opt, RunManifest& manifest)
{
    const NaturalHistoryParams params = params_file(cfg.path(cfg.json, "params"), manifest);
    const ScreeningProtocol protocol  = protocol_entry(section(cfg.json, "protocol"), cfg, manifest);
    std::vector<std::pair<std::string, ScreeningProtocol>> comparators;
    if (cfg.json.contains("comparators")) {
        for (const auto& c : cfg.json.at("comparators")) {
            comparators.emplace_back(get_or<std::string>(c, "label", "comparator"),
                                     protocol_entry(section(c, "protocol"), cfg, manifest));
        }
    }

    const TrialProjection p = stage_shift(params, protocol);
    std::ostringstream summary;
    summary << "metric,value\n";
    summary << "cumulative_shift," << num(p.cumulative_shift) << '\n';
    summary << "advanced_screened," << num(p.advanced_screened()) << '\n';
    summary << "advanced_control," << num(p.advanced_control()) << '\n';
    for (const auto& [label, cp] : comparators) {
        const TrialProjection c = stage_shift(params, cp);
        summary << "comparator_" << label << "_cumulative_shift," << num(c.cumulative_shift) << '\n';
        summary << "relative_reduction_vs_" << label << ',' << num(relative_reduction(c, p)) << '\n';
    }

    Artifacts out(opt.out_dir, manifest);
    out.add("projection.csv", projection_csv(p));
    out.add("summary.csv", summary.str());
    out.commit(exit_ok);
    return exit_ok;
}

int cmd_sweep(const Config& cfg, std::uint64_t seed, const RunOptions& opt, RunManifest& manifest)
{
    std::vector<NamedParams> models;
    for (const auto& m : section(cfg.json, "models")) {
        const std::string label = get_or<std::string>(m, "label", "model" + std::to_string(models.size() + 1));
        if (m.contains("params")) {
            models.push_back({label, params_file(cfg.path(m, "params"), manifest)});
        }
        else {
            const FitScenario s = parse_fit_scenario(section(m, "fit"), cfg, seed, opt.threads);
            const IncidenceTable table = load_incidence_file(s.incidence);
            manifest.add_input(s.incidence);
            models.push_back({label, run_fit(s, table).result.params});
        }
    }
    std::vector<NamedSchedule> schedules;
    for (const auto& s : section(cfg.json, "schedules")) {
        schedules.push_back({get_or<std::string>(s, "label", "schedule" + std::to_string(schedules.size() + 1)),
                             get_or<std::vector<double>>(s, "screen_ages", {}),
                             get_or<double>(s, "followup_end", 0.0)});
    }
    const Json& g = section(cfg.json, "grid");
    const SensitivityGrid grid{get_or<std::vector<double>>(g, "early", {}),
                               get_or<std::vector<double>>(g, "advanced", {})};

    const std::vector<SweepRow> rows = sweep(models, schedules, grid, opt.threads);
    std::ostringstream s;
    s << "model,omst,lmst,emst,schedule,screen_ages,followup_end,sensitivity_early,sensitivity_advanced,"
         "cumulative_shift,error\n";
    for (const auto& r : rows) {
        const NaturalHistoryParams& p = models[r.model_index].params;
        const NamedSchedule& sch      = schedules[r.schedule_index];
        s << quote(r.model_label) << ',' << num(omst(p)) << ',' << num(lmst(p)) << ',' << num(emst(p)) << ','
          << quote(r.schedule_label) << ',' << join_ages(sch.screen_ages) << ',' << num(sch.followup_end) << ','
          << num(r.sensitivity.early) << ',' << num(r.sensitivity.advanced) << ','
          << (r.shift ? num(*r.shift) : "") << ',' << quote(r.error) << '\n';
    }
    Artifacts out(opt.out_dir, manifest);
    out.add("sweep.csv", s.str());
    out.commit(exit_ok);
    return exit_ok;
}

int cmd_mced(const Config& cfg, const RunOptions& opt, RunManifest& manifest)
{
    struct Entry {
        std::string group;
        NamedParams model;
    };
    std::vector<Entry> entries;
    std::vector<std::string> groups;
    for (const auto& m : section(cfg.json, "models")) {
        Entry e{get_or<std::string>(m, "group", "default"),
                {get_or<std::string>(m, "site", "site"), params_file(cfg.path(m, "params"), manifest)}};
        if (std::find(groups.begin(), groups.end(), e.group) == groups.end()) {
            groups.push_back(e.group);
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) {
        throw InvalidArgument("mced config lists no models");
    }
    std::vector<std::pair<std::string, ScreeningProtocol>> protocols;
    for (const auto& p : section(cfg.json, "protocols")) {
        protocols.emplace_back(get_or<std::string>(p, "label", "protocol" + std::to_string(protocols.size() + 1)),
                               protocol_entry(p.contains("protocol") ? p.at("protocol") : p, cfg, manifest));
    }
    if (protocols.empty()) {
        throw InvalidArgument("mced config lists no protocols");
    }

    std::ostringstream s;
    s << "protocol,group,site,kind,sensitivity_early,sensitivity_advanced,screen_ages,followup_end,"
         "advanced_screened,advanced_control,shift\n";
    for (const auto& [label, protocol] : protocols) {
        for (const auto& group : groups) {
            std::vector<NamedParams> models;
            for (const auto& e : entries) {
                if (e.group == group) {
                    models.push_back(e.model);
                }
            }
            const McedProjection mp = mced_project(models, protocol, opt.threads);
            auto row = [&](const std::string& site, const char* kind, double screened, double control,
                           double shift) {
                s << quote(label) << ',' << quote(group) << ',' << quote(site) << ',' << kind << ','
                  << num(protocol.sensitivity.early) << ',' << num(protocol.sensitivity.advanced) << ','
                  << join_ages(protocol.screen_ages) << ',' << num(protocol.followup_end) << ',' << num(screened)
                  << ',' << num(control) << ',' << num(shift) << '\n';
            };
            double screened = 0.0, control = 0.0;
            for (const auto& site : mp.sites) {
                row(site.site, "site", site.projection.advanced_screened(), site.projection.advanced_control(),
                    site.projection.cumulative_shift);
                screened += site.projection.advanced_screened();
                control += site.projection.advanced_control();
            }
            row("pooled", "extension", screened, control, mp.pooled_shift);
        }
    }
    Artifacts out(opt.out_dir, manifest);
    out.add("mced.csv", s.str());
    out.commit(exit_ok);
    return exit_ok;
}

int cmd_derive_inputs(const Config& cfg, const RunOptions& opt, RunManifest& manifest)
{
    const fs::path dir = cfg.path(cfg.json, "tables_dir");
    auto table_path    = [&](const char* key, const char* fallback) {
        const fs::path p = dir / get_or<std::string>(cfg.json, key, fallback);
        if (!fs::exists(p)) {
            throw MissingInput(std::string("missing table '") + key + "': " + p.string());
        }
        manifest.add_input(p);
        return p;
    };
    auto open = [](const fs::path& p) {
        std::ifstream in(p);
        if (!in) {
            throw MissingInput("cannot open " + p.string());
        }
        return in;
    };

    const fs::path weights_path = table_path("proportions", "table_s1_proportions.csv");
    const fs::path sens_path    = table_path("sensitivities", "table_s2_sensitivity.csv");
    const fs::path trans_path   = table_path("transitions", "table_s4_transitions.csv");

    std::ifstream weights_in = open(weights_path);
    const StageHistologyWeights weights = load_stage_weights(weights_in);
    std::ifstream sens_in               = open(sens_path);
    const std::vector<SensitivityTable> tests = load_sensitivities(sens_in);

    std::vector<StageChain> chains;
    const std::string first_advanced = get_or<std::string>(cfg.json, "first_advanced", "IIIA");
    if (cfg.json.contains("sojourn_men") || cfg.json.contains("sojourn_women")) {
        const double male_share = get_or<double>(cfg.json, "male_share", 0.59);
        std::ifstream men_in    = open(table_path("sojourn_men", ""));
        std::ifstream women_in  = open(table_path("sojourn_women", ""));
        std::ifstream t1 = open(trans_path), t2 = open(trans_path);
        const auto men   = load_stage_chains(men_in, t1, first_advanced);
        const auto women = load_stage_chains(women_in, t2, first_advanced);
        for (std::size_t h = 0; h < men.size(); ++h) {
            chains.push_back(average_sexes(men.at(h), women.at(h), male_share));
        }
    }
    else {
        std::ifstream mst_in = open(table_path("sojourn", "table_s3_sojourn.csv"));
        std::ifstream tr_in  = open(trans_path);
        chains               = load_stage_chains(mst_in, tr_in, first_advanced);
    }

    const DerivedSojourn sojourn = derive_sojourn_inputs(chains, weights.histologies, weights.shares);
    Json hyp;
    hyp["omst"] = sojourn.weighted.omst;
    hyp["lmst"] = sojourn.weighted.lmst;
    hyp["emst"] = sojourn.weighted.emst;

    Json sens = Json::object();
    std::ostringstream by_hist;
    by_hist << "test,stage_group,histology,sensitivity\n";
    for (const auto& t : tests) {
        const double e = weighted_sensitivity(t, weights, StageGroup::Early);
        const double a = weighted_sensitivity(t, weights, StageGroup::Advanced);
        sens[t.test]   = {{"sensitivity_early", e}, {"sensitivity_advanced", a}};
        for (StageGroup g : {StageGroup::Early, StageGroup::Advanced}) {
            const auto v = stage_weighted_sensitivity(t, weights, g);
            for (std::size_t h = 0; h < v.size(); ++h) {
                by_hist << quote(t.test) << ',' << (g == StageGroup::Early ? "early" : "advanced") << ','
                        << quote(weights.histologies[h]) << ',' << num(v[h]) << '\n';
            }
        }
    }

    std::ostringstream soj;
    soj << "histology,share,omst,emst,lmst\n";
    for (std::size_t h = 0; h < sojourn.histologies.size(); ++h) {
        const auto& v = sojourn.by_histology[h];
        soj << quote(sojourn.histologies[h]) << ',' << num(weights.shares[h]) << ',' << num(v.omst) << ','
            << num(v.emst) << ',' << num(v.lmst) << '\n';
    }
    soj << "weighted,1," << num(sojourn.weighted.omst) << ',' << num(sojourn.weighted.emst) << ','
        << num(sojourn.weighted.lmst) << '\n';

    Artifacts out(opt.out_dir, manifest);
    out.add("hypothesis.json", dump(hyp));
    out.add("sensitivities.json", dump(sens));
    out.add("sojourn_by_histology.csv", soj.str());
    out.add("sensitivity_by_histology.csv", by_hist.str());
    out.commit(exit_ok);
    return exit_ok;
}

int cmd_simulate(const Config& cfg, std::uint64_t seed, const RunOptions& opt, RunManifest& manifest)
{
    const NaturalHistoryParams params = params_file(cfg.path(cfg.json, "params"), manifest);
    const ScreeningProtocol protocol  = protocol_entry(section(cfg.json, "protocol"), cfg, manifest);
    const auto n                      = get_or<std::int64_t>(cfg.json, "n", 1000000);

    const CohortSimulation sim      = simulate_cohort(params, protocol, n, seed, opt.threads);
    const TrialProjection analytic  = stage_shift(params, protocol);
    std::ostringstream s;
    s << "interval,age_lo,age_hi,screen_detected,screen_detected_se,interval_clinical,interval_clinical_se,control,"
         "control_se,analytic_screen_detected,analytic_interval_clinical,analytic_control\n";
    for (int l = 1; l <= protocol.screens(); ++l) {
        const std::size_t i = static_cast<std::size_t>(l - 1);
        s << l << ',' << num(protocol.observation_age(l)) << ',' << num(protocol.observation_age(l + 1)) << ','
          << num(sim.projection.screen_detected[i]) << ',' << num(sim.screen_detected_se[i]) << ','
          << num(sim.projection.interval_clinical[i]) << ',' << num(sim.interval_clinical_se[i]) << ','
          << num(sim.projection.control[i]) << ',' << num(sim.control_se[i]) << ','
          << num(analytic.screen_detected[i]) << ',' << num(analytic.interval_clinical[i]) << ','
          << num(analytic.control[i]) << '\n';
    }
    std::ostringstream summary;
    summary << "metric,value\n"
            << "enrolled," << sim.enrolled << '\n'
            << "sampled," << sim.sampled << '\n'
            << "cumulative_shift," << num(sim.projection.cumulative_shift) << '\n'
            << "cumulative_shift_se," << num(sim.cumulative_shift_se) << '\n'
            << "analytic_cumulative_shift," << num(analytic.cumulative_shift) << '\n';

    Artifacts out(opt.out_dir, manifest);
    out.add("simulation.csv", s.str());
    out.add("summary.csv", summary.str());
    out.commit(exit_ok);
    return exit_ok;
}

} // namespace

int run(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        const fs::path config_path = options.config;
        Config cfg{read_json_file(config_path), config_path.parent_path()};
        if (!cfg.json.is_object()) {
            throw ParseError("config must be a JSON object");
        }
        const std::uint64_t seed = options.seed.value_or(get_or<std::uint64_t>(cfg.json, "seed", 1));
        RunManifest manifest(options.command, cfg.json, seed);
        manifest.add_input(config_path);

        int code = exit_usage;
        if (options.command == "fit") {
            code = cmd_fit(cfg, seed, options, manifest);
        }
        else if (options.command == "project") {
            code = cmd_project(cfg, options, manifest);
        }
        else if (options.command == "sweep") {
            code = cmd_sweep(cfg, seed, options, manifest);
        }
        else if (options.command == "mced") {
            code = cmd_mced(cfg, options, manifest);
        }
        else if (options.command == "derive-inputs") {
            code = cmd_derive_inputs(cfg, options, manifest);
        }
        else if (options.command == "simulate") {
            code = cmd_simulate(cfg, seed, options, manifest);
        }
        else {
            err << "unknown command '" << options.command << "'\n";
            return exit_usage;
        }
        if (code == exit_ok) {
            out << "wrote " << (options.out_dir / "manifest.json").string() << '\n';
        }
        else if (code == exit_non_convergence) {
            err << "fit did not converge; diagnostics written to " << options.out_dir.string() << '\n';
        }
        return code;
    }
    catch (const NonConvergence& e) {
        err << "non-convergence: " << e.what() << '\n';
        return exit_non_convergence;
    }
    catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical_error;
    }
    catch (const MissingInput& e) {
        err << "file not found: " << e.what() << '\n';
        return exit_input_error;
    }
    catch (const Error& e) {
        err << "input error: " << e.what() << '\n';
        return exit_input_error;
    }
    catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

} // namespace stageshift::cli
