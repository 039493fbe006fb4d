#include "forest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace forest {

namespace {

std::size_t burn_in_start(const SolutionPath& path, double burn_in) {
    const auto n = path.t.size();
    auto start = static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(n)));
    if (start >= n)
        start = n - 1;
    return start;
}

std::string format_value(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

} // namespace

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
    }
    return "unknown";
}

CertificationResult check_envelope(const SolutionPath& path,
                                   const EnvelopeBundle& env, double mu,
                                   double slack, double abs_slack) {
    CertificationResult result;
    result.check_name = "envelope_domination";
    result.verdict = Verdict::pass;

    // Work on the b axis: b(t) <= e^{-mu t} xi(t) (1+slack) + abs e^{-mu t},
    // identical to the e^{mu t}-scaled statement but immune to overflow.
    const double flat = env.sup_b_bound();
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < path.t.size(); ++n) {
        const double t = path.t[n];
        const double scale = std::exp(-mu * t);
        const double bound =
            std::min(env.xi_scaled(t), flat) * (1.0 + slack) + abs_slack * scale;
        const double margin = bound - path.b[n];
        if (margin < worst_margin) {
            worst_margin = margin;
            result.witness_t = t;
            result.witness_lhs = path.b[n];
            result.witness_rhs = bound;
        }
        if (margin < 0.0)
            result.verdict = Verdict::fail;
    }
    result.margin = worst_margin;
    if (result.verdict == Verdict::fail)
        result.reason = "path exceeds the envelope";
    return result;
}

CertificationResult check_ultimate_bound(const SolutionPath& path,
                                         const EnvelopeBundle& env, double mu,
                                         double window_fraction, double slack) {
    CertificationResult result;
    result.check_name = "ultimate_bound";
    const double horizon = path.t.back();
    const double decay_rate = mu - env.lambda_plus;
    const double needed =
        decay_rate > 0.0 ? std::log(1e3) / decay_rate
                         : std::numeric_limits<double>::infinity();
    if (!(decay_rate > 0.0) || std::exp(-decay_rate * horizon) > 1e-3) {
        result.verdict = Verdict::skipped;
        result.reason = "transient not decayed; requires T >= " + format_value(needed);
        return result;
    }

    const auto start = burn_in_start(path, 1.0 - window_fraction);
    double top = 0.0;
    double top_t = path.t[start];
    for (std::size_t n = start; n < path.t.size(); ++n) {
        if (path.b[n] > top) {
            top = path.b[n];
            top_t = path.t[n];
        }
    }
    const double bound = env.alpha1 * (1.0 + slack);
    result.witness_t = top_t;
    result.witness_lhs = top;
    result.witness_rhs = bound;
    result.margin = bound - top;
    result.verdict = top <= bound ? Verdict::pass : Verdict::fail;
    if (result.verdict == Verdict::fail)
        result.reason = "trailing-window max exceeds alpha1";
    return result;
}

CertificationResult check_attractor_box(const SolutionPath& path,
                                        double theta2_value,
                                        std::optional<double> b_star,
                                        double burn_in, double slack) {
    CertificationResult result;
    result.check_name = "attractor_box";
    if (path.max_b() == 0.0) {
        result.verdict = Verdict::skipped;
        result.reason = "zero path carries no persistence claim";
        return result;
    }
    const auto start = burn_in_start(path, burn_in);
    double floor = std::numeric_limits<double>::infinity();
    double top = 0.0;
    double floor_t = path.t[start], top_t = path.t[start];
    for (std::size_t n = start; n < path.t.size(); ++n) {
        if (path.b[n] < floor) {
            floor = path.b[n];
            floor_t = path.t[n];
        }
        if (path.b[n] > top) {
            top = path.b[n];
            top_t = path.t[n];
        }
    }
    const double upper = theta2_value * (1.0 + slack);
    const bool upper_ok = top <= upper;
    const bool floor_ok = floor > 0.0;
    result.verdict = (upper_ok && floor_ok) ? Verdict::pass : Verdict::fail;
    if (upper_ok) {
        result.witness_t = floor_t;
        result.witness_lhs = floor;
        result.witness_rhs = 0.0;
        result.margin = floor;
    } else {
        result.witness_t = top_t;
        result.witness_lhs = top;
        result.witness_rhs = upper;
        result.margin = upper - top;
    }
    std::ostringstream detail;
    detail << "empirical_floor = " << format_value(floor);
    if (b_star)
        detail << ", b_star = " << format_value(*b_star);
    result.detail = detail.str();
    if (!floor_ok)
        result.reason = "post-burn-in floor is not positive";
    else if (!upper_ok)
        result.reason = "post-burn-in max exceeds theta2";
    return result;
}

CertificationResult check_squeeze(double m, double big_m,
                                  const ModelParams& params, double tol) {
    if (!(m >= 0.0) || !(big_m >= m))
        throw std::invalid_argument("check_squeeze: need 0 <= m <= M");
    CertificationResult result;
    result.check_name = "interval_squeeze";
    const double f_m = F_of_b(params, m);
    const double f_big = F_of_b(params, big_m);
    const bool lower_ok = f_m <= m * (1.0 + tol);
    const bool upper_ok = big_m <= f_big * (1.0 + tol);
    result.verdict = (lower_ok && upper_ok) ? Verdict::pass : Verdict::fail;
    if (!lower_ok) {
        result.witness_lhs = f_m;
        result.witness_rhs = m * (1.0 + tol);
    } else {
        result.witness_lhs = big_m;
        result.witness_rhs = f_big * (1.0 + tol);
    }
    result.margin = result.witness_rhs - result.witness_lhs;
    if (result.verdict == Verdict::fail)
        result.reason = "[m, M] is not contained in [F(m), F(M)]";

    if (check_hypothesis_M(params).satisfied()) {
        if (const auto b_star = positive_equilibrium(params)) {
            const double gap = std::max(std::abs(m - *b_star), std::abs(big_m - *b_star));
            result.detail = "fixed_point_gap = " + format_value(gap);
        }
    }
    return result;
}

CertificationResult check_positivity(const SolutionPath& path,
                                     const ModelParams& params,
                                     const History& phi) {
    CertificationResult result;
    result.check_name = "eventual_positivity";
    if (phi.max_sample() == 0.0) {
        result.verdict = Verdict::skipped;
        result.reason = "zero history";
        return result;
    }
    // The positivity claim splits on inf g > 0 versus bounded paths; with a
    // vanishing growth rate and an unbounded path neither branch applies.
    const bool g_vanishes = params.g().limit_at_infinity() == 0.0;
    const bool looks_unbounded = path.b.back() > 10.0 * std::max(1.0, phi.max_sample());
    if (g_vanishes && looks_unbounded) {
        result.verdict = Verdict::skipped;
        result.reason = "growth rate vanishes and path is unbounded; hypothesis unmet";
        return result;
    }
    result.witness_t = path.t.back();
    result.witness_lhs = path.b.back();
    result.witness_rhs = 0.0;
    result.margin = path.b.back();
    result.verdict = path.b.back() > 0.0 ? Verdict::pass : Verdict::fail;
    if (result.verdict == Verdict::fail)
        result.reason = "terminal value is not positive";
    return result;
}

std::vector<CertificationResult>
certify_classification(const ModelParams& params,
                       const std::vector<History>& scenarios,
                       const CertifyConfig& cfg) {
    const AnalysisReport report = classify(params);
    std::vector<CertificationResult> results;
    results.reserve(scenarios.size());

    for (std::size_t idx = 0; idx < scenarios.size(); ++idx) {
        const History& phi = scenarios[idx];
        CertificationResult result;
        result.check_name = "classification[" + std::to_string(idx) + "]";
        const SolutionPath path = solve_ivp(params, phi, cfg.solver);
        const double horizon = path.t.back();

        switch (report.kind) {
        case TrichotomyCase::ConvergentA: {
            if (!report.b_star) {
                result.verdict = Verdict::skipped;
                result.reason = "no positive equilibrium available";
                break;
            }
            if (phi.is_identically_zero()) {
                result.verdict = Verdict::skipped;
                result.reason = "zero history is outside the convergence claim";
                break;
            }
            const double target = *report.b_star;
            const double gap = std::abs(path.b.back() - target);
            const double allowed = cfg.terminal_tol * std::max(1.0, target);
            result.witness_t = horizon;
            result.witness_lhs = gap;
            result.witness_rhs = allowed;
            result.margin = allowed - gap;
            result.verdict = gap <= allowed ? Verdict::pass : Verdict::fail;
            if (result.verdict == Verdict::fail)
                result.reason = "terminal value misses the equilibrium";
            break;
        }
        case TrichotomyCase::UnboundedB: {
            bool monotone = true;
            double worst_t = 0.0, worst_drop = 0.0;
            for (std::size_t n = 1; n < path.b.size(); ++n) {
                const double drop = path.b[n - 1] - path.b[n];
                if (drop > cfg.growth_slack && drop > worst_drop) {
                    monotone = false;
                    worst_drop = drop;
                    worst_t = path.t[n];
                }
            }
            const double scale = std::max(phi.max_sample(), 0.0);
            const double needed = cfg.unbounded_factor * scale;
            const bool grew = path.b.back() >= needed;
            result.witness_t = monotone ? horizon : worst_t;
            result.witness_lhs = monotone ? path.b.back() : worst_drop;
            result.witness_rhs = monotone ? needed : cfg.growth_slack;
            result.margin = monotone ? path.b.back() - needed : -worst_drop;
            result.verdict = (monotone && grew) ? Verdict::pass : Verdict::fail;
            if (!monotone)
                result.reason = "path decreases beyond slack";
            else if (!grew)
                result.reason = "path did not clear the growth factor";
            break;
        }
        case TrichotomyCase::ExtinctC: {
            const double allowed = cfg.extinct_tol * std::max(1.0, phi.max_sample());
            result.witness_t = horizon;
            result.witness_lhs = path.b.back();
            result.witness_rhs = allowed;
            result.margin = allowed - path.b.back();
            result.verdict = path.b.back() <= allowed ? Verdict::pass : Verdict::fail;
            if (result.verdict == Verdict::fail)
                result.reason = "terminal value has not vanished";
            break;
        }
        }
        results.push_back(std::move(result));
    }
    return results;
}

CertificationResult check_monotone_order(const ModelParams& params,
                                         const History& phi_low,
                                         const History& phi_high,
                                         const SolverConfig& solver,
                                         double slack) {
    CertificationResult result;
    result.check_name = "monotone_order";
    if (!check_hypothesis_M(params).satisfied()) {
        result.verdict = Verdict::skipped;
        result.reason = "monotone hypothesis fails";
        return result;
    }
    const SolutionPath low = solve_ivp(params, phi_low, solver);
    const SolutionPath high = solve_ivp(params, phi_high, solver);
    result.verdict = Verdict::pass;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < low.b.size(); ++n) {
        const double excess = low.b[n] - high.b[n];
        if (excess > worst) {
            worst = excess;
            result.witness_t = low.t[n];
            result.witness_lhs = low.b[n];
            result.witness_rhs = high.b[n] + slack;
        }
        if (excess > slack)
            result.verdict = Verdict::fail;
    }
    result.margin = slack - worst;
    if (result.verdict == Verdict::fail)
        result.reason = "order not preserved";
    return result;
}

ModelParams majorant_params(const ModelParams& params) {
    RateSpec majorant = RateSpec::affine(RateRole::reproduction,
                                         params.lipschitz_L(),
                                         params.beta_at_xm(), params.x_m());
    return ModelParams(params.mu(), params.x_m(), params.rho(), std::move(majorant),
                       params.g());
}

CertificationResult check_majorant_domination(const ModelParams& params,
                                              const History& phi,
                                              const SolverConfig& solver,
                                              double slack) {
    CertificationResult result;
    result.check_name = "majorant_domination";
    if (!check_hypothesis_M(params).satisfied()) {
        result.verdict = Verdict::skipped;
        result.reason = "monotone hypothesis fails";
        return result;
    }
    const ModelParams dominating = majorant_params(params);
    const SolutionPath base = solve_ivp(params, phi, solver);
    const SolutionPath upper = solve_ivp(dominating, phi, solver);
    result.verdict = Verdict::pass;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < base.b.size(); ++n) {
        const double excess = base.b[n] - upper.b[n];
        if (excess > worst) {
            worst = excess;
            result.witness_t = base.t[n];
            result.witness_lhs = base.b[n];
            result.witness_rhs = upper.b[n] + slack;
        }
        if (excess > slack)
            result.verdict = Verdict::fail;
    }
    result.margin = slack - worst;
    if (result.verdict == Verdict::fail)
        result.reason = "original path exceeds the majorant path";
    return result;
}

std::pair<History, History> ordered_history_pair(std::mt19937_64& rng,
                                                 double span, double step) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double base_level = 0.2 + 2.0 * unit(rng);
    const double base_amp = base_level * unit(rng);
    const double base_freq = 0.3 + 2.0 * unit(rng);
    const double base_phase = 6.28318530717958648 * unit(rng);
    const double bump_level = 0.05 + 1.5 * unit(rng);
    const double bump_amp = bump_level * unit(rng);
    const double bump_freq = 0.3 + 2.0 * unit(rng);
    const double bump_phase = 6.28318530717958648 * unit(rng);

    const auto low_f = [&](double s) {
        return base_level + base_amp * std::sin(base_freq * s + base_phase);
    };
    const auto bump_f = [&](double s) {
        return 0.5 * bump_level * (1.0 + std::cos(bump_freq * s + bump_phase)) +
               bump_amp;
    };
    const double low_tail = low_f(-span);
    const double high_tail = low_tail + bump_f(-span);
    History low = History::from_function(low_f, span, step, TailKind::constant,
                                         low_tail);
    History high = History::from_function(
        [&](double s) { return low_f(s) + bump_f(s); }, span, step,
        TailKind::constant, high_tail);
    return {std::move(low), std::move(high)};
}

std::vector<ConvergenceRow> convergence_study(const ModelParams& params,
                                              const History& phi,
                                              const SolverConfig& cfg,
                                              int levels) {
    if (levels < 3)
        throw std::invalid_argument("convergence_study: need at least 3 levels");

    const double h0 = cfg.h;
    const double h_ref = h0 / std::pow(2.0, levels - 1) / 8.0;

    SolverConfig ref_cfg = cfg;
    ref_cfg.h = h_ref;
    const SolutionPath ref = solve_ivp(params, phi.resampled(h_ref), ref_cfg);

    const auto coarse_count = static_cast<std::size_t>(std::round(cfg.T / h0));
    double ref_scale = 1.0;
    for (double v : ref.b)
        ref_scale = std::max(ref_scale, std::abs(v));

    std::vector<ConvergenceRow> table(levels);
    for (int k = 0; k < levels; ++k) {
        SolverConfig level_cfg = cfg;
        level_cfg.h = h0 / std::pow(2.0, k);
        const SolutionPath path = solve_ivp(params, phi.resampled(level_cfg.h), level_cfg);
        const auto stride_level = std::size_t{1} << k;
        const auto stride_ref =
            static_cast<std::size_t>(std::round(h0 / h_ref));
        double err = 0.0;
        // Nodes at multiples of the coarsest step, first cell excluded.
        for (std::size_t i = 1; i <= coarse_count; ++i)
            err = std::max(err, std::abs(path.b[i * stride_level] - ref.b[i * stride_ref]));
        table[k].h = level_cfg.h;
        table[k].max_err = err;
    }
    for (int k = 1; k < levels; ++k) {
        const double floor_level = 1e-12 * ref_scale;
        if (table[k].max_err > floor_level && table[k - 1].max_err > floor_level) {
            table[k].ratio = table[k - 1].max_err / table[k].max_err;
            table[k].ratio_defined = true;
        }
    }
    return table;
}

} // namespace forest
