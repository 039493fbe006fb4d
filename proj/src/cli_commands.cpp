#include "forest/cli.hpp"

#include "forest/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace forest {

namespace {

// Tolerance overrides are consumed key by key; leftovers are a usage error.
class OverrideSet {
public:
    explicit OverrideSet(std::map<std::string, double> values)
        : values_(std::move(values)) {}

    std::optional<double> take(const std::string& key) {
        const auto it = values_.find(key);
        if (it == values_.end())
            return std::nullopt;
        const double value = it->second;
        values_.erase(it);
        return value;
    }

    void finish() const {
        if (values_.empty())
            return;
        std::ostringstream out;
        out << "unknown tolerance override key(s):";
        for (const auto& [key, value] : values_)
            out << " '" << key << "'";
        throw ConfigError(out.str());
    }

private:
    std::map<std::string, double> values_;
};

double snap_to_grid(double target, double h) {
    return static_cast<double>(std::max<long>(1, std::lround(target / h))) * h;
}

SolverConfig make_solver(const RunManifest& manifest, OverrideSet& overrides,
                         double default_h, double default_T) {
    SolverConfig cfg;
    cfg.h = default_h;
    bool t_given = false;
    if (const auto v = overrides.take("solver.h"))
        cfg.h = *v;
    if (const auto v = overrides.take("solver.T")) {
        cfg.T = *v;
        t_given = true;
    }
    if (const auto v = overrides.take("solver.trunc_tol"))
        cfg.trunc_tol = *v;
    if (const auto v = overrides.take("solver.picard_tol"))
        cfg.picard_tol = *v;
    if (const auto v = overrides.take("solver.picard_max"))
        cfg.picard_max = static_cast<int>(std::lround(*v));
    if (manifest.h)
        cfg.h = *manifest.h;
    if (manifest.T) {
        cfg.T = *manifest.T;
        t_given = true;
    }
    if (!t_given)
        cfg.T = snap_to_grid(default_T, cfg.h);
    return cfg;
}

History align(const History& phi, double h) {
    if (std::abs(phi.step() - h) <= 1e-12 * h)
        return phi;
    return phi.resampled(h);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

std::optional<EnvelopeBundle> try_envelope(const ModelParams& params,
                                           const History& phi) {
    if (params.beta_at_xm() >= params.mu())
        return std::nullopt;
    try {
        return growth_envelope(params, weighted_norm(phi, params.rho()),
                               weighted_norm(phi, params.mu()));
    } catch (const std::exception&) {
        return std::nullopt; // no admissible margin for this growth profile
    }
}

void log_results(const std::vector<CertificationResult>& results,
                 std::ostream& log) {
    for (const auto& r : results) {
        log << r.check_name << ": " << to_string(r.verdict);
        if (!r.reason.empty())
            log << " (" << r.reason << ")";
        log << '\n';
    }
}

} // namespace

int run_analyze(const RunManifest& manifest, std::ostream& log) {
    const LoadedConfig cfg = load_config_file(manifest.config_path);
    OverrideSet overrides(manifest.tol_overrides);
    QuadTolerance quad;
    if (const auto v = overrides.take("quad.abs_tol"))
        quad.abs_tol = *v;
    overrides.finish();

    const AnalysisReport report = classify(cfg.params, quad);
    std::filesystem::create_directories(manifest.out_dir);
    write_file(manifest.out_dir / "analysis.txt",
               file_preamble(cfg.digest_hex) +
                   serialize_analysis(report, cfg.params));
    log << one_line_classification(report) << '\n';
    return 0;
}

int run_simulate(const RunManifest& manifest, std::ostream& log) {
    const LoadedConfig cfg = load_config_file(manifest.config_path);
    OverrideSet overrides(manifest.tol_overrides);
    const SolverConfig solver =
        make_solver(manifest, overrides, cfg.phi.step(), 40.0);
    overrides.finish();

    const History phi = align(cfg.phi, solver.h);
    const SolutionPath path = solve_ivp(cfg.params, phi, solver);

    std::filesystem::create_directories(manifest.out_dir);
    std::ostringstream table;
    export_path_table(path, table);
    write_file(manifest.out_dir / "path.csv",
               file_preamble(cfg.digest_hex) + table.str());

    if (const auto env = try_envelope(cfg.params, phi)) {
        std::ostringstream sidecar;
        sidecar << "t,xi,xi_scaled\n";
        for (const double t : path.t)
            sidecar << format_sci(t) << ',' << format_sci(env->xi(t)) << ','
                    << format_sci(env->xi_scaled(t)) << '\n';
        write_file(manifest.out_dir / "envelope.csv",
                   file_preamble(cfg.digest_hex) + sidecar.str());
        log << "wrote path.csv and envelope.csv\n";
    } else {
        log << "wrote path.csv\n";
    }
    log << "rows " << path.t.size() << ", max residual "
        << format_sci(path.max_residual()) << ", clamps " << path.clamp_count
        << '\n';
    return 0;
}

int run_verify(const RunManifest& manifest, std::ostream& log) {
    const LoadedConfig cfg = load_config_file(manifest.config_path);
    OverrideSet overrides(manifest.tol_overrides);
    CertifyConfig ccfg;
    ccfg.solver = make_solver(manifest, overrides, 0.04, 60.0);
    if (const auto v = overrides.take("diag.terminal_tol"))
        ccfg.terminal_tol = *v;
    if (const auto v = overrides.take("diag.extinct_tol"))
        ccfg.extinct_tol = *v;
    if (const auto v = overrides.take("diag.unbounded_factor"))
        ccfg.unbounded_factor = *v;
    if (const auto v = overrides.take("diag.growth_slack"))
        ccfg.growth_slack = *v;
    if (const auto v = overrides.take("diag.order_slack"))
        ccfg.order_slack = *v;
    if (const auto v = overrides.take("diag.envelope_slack"))
        ccfg.envelope_slack = *v;
    if (const auto v = overrides.take("diag.envelope_abs"))
        ccfg.envelope_abs = *v;
    if (const auto v = overrides.take("diag.ultimate_slack"))
        ccfg.ultimate_slack = *v;
    if (const auto v = overrides.take("diag.box_slack"))
        ccfg.box_slack = *v;
    if (const auto v = overrides.take("diag.burn_in"))
        ccfg.burn_in = *v;
    if (const auto v = overrides.take("diag.window_fraction"))
        ccfg.window_fraction = *v;
    std::size_t pair_count = 20;
    std::size_t majorant_count = 10;
    if (const auto v = overrides.take("verify.pairs"))
        pair_count = static_cast<std::size_t>(std::max(0l, std::lround(*v)));
    if (const auto v = overrides.take("verify.majorants"))
        majorant_count =
            static_cast<std::size_t>(std::max(0l, std::lround(*v)));
    overrides.finish();

    const ModelParams& params = cfg.params;
    const double h = ccfg.solver.h;
    const History phi = align(cfg.phi, h);
    const AnalysisReport report = classify(params);
    log << one_line_classification(report) << '\n';

    std::vector<CertificationResult> results;
    const auto push = [&](CertificationResult r, const std::string& tag) {
        if (!tag.empty())
            r.check_name += "[" + tag + "]";
        results.push_back(std::move(r));
    };

    // Trichotomy scenarios: the configured history plus a standard spread.
    const double short_span = snap_to_grid(10.0, h);
    const double long_span = snap_to_grid(40.0, h);
    std::vector<History> scenarios;
    std::vector<std::string> labels;
    scenarios.push_back(phi);
    labels.emplace_back("config");
    for (const double level : {0.05, 1.0, 10.0}) {
        scenarios.push_back(History::constant(level, short_span, h));
        std::ostringstream label;
        label << "const_" << level;
        labels.push_back(label.str());
    }
    scenarios.push_back(History::from_function(
        [](double s) { return 1.0 + 0.5 * std::sin(s); }, long_span, h,
        TailKind::constant, 1.0));
    labels.emplace_back("oscillatory");

    {
        auto rows = certify_classification(params, scenarios, ccfg);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].check_name = "classification";
            push(std::move(rows[i]), labels[i]);
        }
    }

    const SolutionPath primary = solve_ivp(params, phi, ccfg.solver);
    push(check_positivity(primary, params, phi), "config");

    if (const auto env = try_envelope(params, phi)) {
        push(check_envelope(primary, *env, params.mu(), ccfg.envelope_slack,
                            ccfg.envelope_abs),
             "config");
        push(check_ultimate_bound(primary, *env, params.mu(),
                                  ccfg.window_fraction, ccfg.ultimate_slack),
             "config");
        const History ones = History::constant(1.0, short_span, h);
        if (const auto env_ones = try_envelope(params, ones))
            push(check_envelope(solve_ivp(params, ones, ccfg.solver), *env_ones,
                                params.mu(), ccfg.envelope_slack,
                                ccfg.envelope_abs),
                 "ones");
    } else {
        CertificationResult skip;
        skip.check_name = "envelope_domination";
        skip.verdict = Verdict::skipped;
        skip.reason = "growth envelope does not apply to this model";
        results.push_back(skip);
    }

    if (report.theta2) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            if (scenarios[i].is_identically_zero())
                continue;
            const SolutionPath boxed =
                i == 0 ? primary : solve_ivp(params, scenarios[i], ccfg.solver);
            push(check_attractor_box(boxed, *report.theta2, report.b_star,
                                     ccfg.burn_in, ccfg.box_slack),
                 labels[i]);
        }
    } else {
        CertificationResult skip;
        skip.check_name = "attractor_box";
        skip.verdict = Verdict::skipped;
        skip.reason = "no finite persistence ceiling for this model";
        results.push_back(skip);
    }

    if (report.b_star) {
        push(check_squeeze(*report.b_star, *report.b_star, params), "b_star");
    } else {
        CertificationResult skip;
        skip.check_name = "interval_squeeze";
        skip.verdict = Verdict::skipped;
        skip.reason = "no positive equilibrium to squeeze around";
        results.push_back(skip);
    }

    std::mt19937_64 rng(manifest.seed);
    for (std::size_t k = 0; k < pair_count; ++k) {
        auto [low, high] = ordered_history_pair(rng, short_span, h);
        push(check_monotone_order(params, low, high, ccfg.solver,
                                  ccfg.order_slack),
             std::to_string(k));
    }
    for (std::size_t k = 0; k < majorant_count; ++k) {
        auto pair = ordered_history_pair(rng, short_span, h);
        push(check_majorant_domination(params, pair.second, ccfg.solver,
                                       ccfg.order_slack),
             std::to_string(k));
    }

    std::size_t passed = 0, failed = 0, skipped = 0;
    for (const auto& r : results) {
        if (r.verdict == Verdict::pass)
            ++passed;
        else if (r.verdict == Verdict::fail)
            ++failed;
        else
            ++skipped;
    }
    log_results(results, log);
    std::ostringstream summary;
    summary << "summary: " << passed << " pass, " << failed << " fail, "
            << skipped << " skipped";
    log << summary.str() << '\n';

    std::filesystem::create_directories(manifest.out_dir);
    write_file(manifest.out_dir / "certification.txt",
               file_preamble(cfg.digest_hex, manifest.seed) +
                   serialize_certifications(results) + summary.str() + "\n");
    return failed == 0 ? 0 : 1;
}

int run_convergence(const RunManifest& manifest, std::ostream& log) {
    const LoadedConfig cfg = load_config_file(manifest.config_path);
    OverrideSet overrides(manifest.tol_overrides);
    const SolverConfig solver = make_solver(manifest, overrides, 0.08, 10.0);
    int levels = 4;
    if (const auto v = overrides.take("study.levels"))
        levels = static_cast<int>(std::lround(*v));
    overrides.finish();

    const auto rows = convergence_study(cfg.params, cfg.phi, solver, levels);
    const std::string table = serialize_convergence(rows);
    std::filesystem::create_directories(manifest.out_dir);
    write_file(manifest.out_dir / "convergence.csv",
               file_preamble(cfg.digest_hex) + table);
    log << table;
    return 0;
}

int run_command(const RunManifest& manifest, std::ostream& log) {
    try {
        if (manifest.command == "analyze")
            return run_analyze(manifest, log);
        if (manifest.command == "simulate")
            return run_simulate(manifest, log);
        if (manifest.command == "verify")
            return run_verify(manifest, log);
        if (manifest.command == "convergence")
            return run_convergence(manifest, log);
        log << "error: unknown command '" << manifest.command << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace forest
