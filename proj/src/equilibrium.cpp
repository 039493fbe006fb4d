#include "forest/equilibrium.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace forest {

namespace {

// One refinement level of the renewal integral
//   int_0^{A} beta_of_offset(inner(a)) e^{-mu a} da,
// inner(a) = int_0^a g((b/mu) e^{-mu tau}) dtau (cumulative trapezoid).
template <typename BetaFn>
double renewal_integral_level(const ModelParams& params,
                              const BetaFn& beta_of_offset,
                              double b, double a_max, std::size_t panels) {
    const double mu = params.mu();
    const double step = a_max / static_cast<double>(panels);
    const double pressure0 = b / mu;
    const double decay_step = std::exp(-mu * step);

    double inner = 0.0;
    double g_prev = params.g_of(pressure0);
    double sum = 0.5 * beta_of_offset(0.0); // e^{-mu*0} = 1
    double decay = 1.0;
    for (std::size_t k = 1; k <= panels; ++k) {
        // Running power of the panel decay, refreshed every 1024 nodes so
        // the accumulated roundoff stays far below the quadrature budget.
        decay = (k & 1023u) == 0
                    ? std::exp(-mu * step * static_cast<double>(k))
                    : decay * decay_step;
        const double g_here = params.g_of(pressure0 * decay);
        inner += 0.5 * step * (g_prev + g_here);
        g_prev = g_here;
        const double term = beta_of_offset(inner) * decay;
        sum += (k == panels) ? 0.5 * term : term;
    }
    return sum * step;
}

// Refine the renewal integral by doubling until two levels agree to abs_tol.
// Root-finders pass a `panel_hint` so consecutive evaluations at nearby b
// resume near the previously converged resolution instead of re-climbing
// from scratch; the final agreement check stays unconditional.
template <typename BetaFn>
double renewal_integral(const ModelParams& params, const BetaFn& beta_of_offset,
                        double b, QuadTolerance tol,
                        std::size_t* panel_hint = nullptr) {
    const double trunc_budget = std::min(1e-12, 0.01 * tol.abs_tol);
    const LinearEnvelope envelope{params.beta_at_xm(),
                                  params.lipschitz_L() * params.g_sup()};
    const double a_max = truncation_horizon(params.mu(), envelope, trunc_budget);
    if (a_max == 0.0)
        return 0.0; // beta identically zero along the whole orbit

    std::size_t panels = 512;
    if (panel_hint != nullptr && *panel_hint / 2 > panels)
        panels = *panel_hint / 2;
    double value = renewal_integral_level(params, beta_of_offset, b, a_max, panels);
    for (int round = 0; round < tol.max_subdivisions; ++round) {
        panels *= 2;
        const double refined =
            renewal_integral_level(params, beta_of_offset, b, a_max, panels);
        const double change = std::abs(refined - value);
        value = refined;
        if (change <= tol.abs_tol) {
            if (panel_hint != nullptr)
                *panel_hint = panels;
            return value;
        }
        if (panels > (std::size_t{1} << 22))
            break; // caller gets the best available value
    }
    return value;
}

} // namespace

double R_of_b(const ModelParams& params, double b, QuadTolerance tol) {
    if (!(b >= 0.0))
        throw std::invalid_argument("R_of_b: b must be nonnegative");
    const auto beta_of_offset = [&](double inner) {
        return params.beta_of(params.x_m() + inner);
    };
    return renewal_integral(params, beta_of_offset, b, tol);
}

double basic_reproduction_number(const ModelParams& params, QuadTolerance tol) {
    // Growth frozen at its zero-pressure value collapses the inner integral
    // to a * g(0); run the same engine with a constant growth callable so the
    // two routes share quadrature behaviour exactly.
    const double g0 = params.g_at_zero();
    const auto beta_of_offset = [&](double inner) {
        return params.beta_of(params.x_m() + inner);
    };
    const double mu = params.mu();
    const double trunc_budget = std::min(1e-12, 0.01 * tol.abs_tol);
    const LinearEnvelope envelope{params.beta_at_xm(),
                                  params.lipschitz_L() * params.g_sup()};
    const double a_max = truncation_horizon(mu, envelope, trunc_budget);

    double value = 0.0;
    if (a_max > 0.0) {
        std::size_t panels = 512;
        auto level = [&](std::size_t n) {
            const double step = a_max / static_cast<double>(n);
            const double decay_step = std::exp(-mu * step);
            double sum = 0.5 * beta_of_offset(0.0);
            double decay = 1.0;
            for (std::size_t k = 1; k <= n; ++k) {
                decay = (k & 1023u) == 0
                            ? std::exp(-mu * step * static_cast<double>(k))
                            : decay * decay_step;
                const double a = step * static_cast<double>(k);
                const double term = beta_of_offset(a * g0) * decay;
                sum += (k == n) ? 0.5 * term : term;
            }
            return sum * step;
        };
        value = level(panels);
        for (int round = 0; round < tol.max_subdivisions; ++round) {
            panels *= 2;
            const double refined = level(panels);
            const double change = std::abs(refined - value);
            value = refined;
            if (change <= tol.abs_tol)
                break;
            if (panels > (std::size_t{1} << 22))
                break;
        }
    }

    const double cross = R_of_b(params, 0.0, tol);
    if (std::abs(cross - value) > 1e-6 * std::max(1.0, std::abs(value)))
        throw std::logic_error(
            "basic_reproduction_number: frozen-growth route disagrees with R(0)");
    return value;
}

double F_of_b(const ModelParams& params, double b, QuadTolerance tol) {
    return b * R_of_b(params, b, tol);
}

std::optional<double> positive_equilibrium(const ModelParams& params,
                                           QuadTolerance tol) {
    const double r0 = basic_reproduction_number(params, tol);
    if (r0 <= 1.0 || params.beta_at_xm() >= params.mu())
        return std::nullopt;

    QuadTolerance inner = tol;
    inner.abs_tol = std::min(tol.abs_tol, 1e-10);
    std::size_t hint = 0;
    const auto beta_cb = [&](double offset) {
        return params.beta_of(params.x_m() + offset);
    };
    auto r = [&](double b) {
        return renewal_integral(params, beta_cb, b, inner, &hint);
    };

    double hi = 1.0;
    while (r(hi) >= 1.0) {
        hi *= 2.0;
        if (hi > 1e8)
            throw std::runtime_error(
                "positive_equilibrium: bracket growth exceeded the overflow guard");
    }
    return find_root_monotone(r, 1.0, 0.0, hi, 1e-9);
}

double R1_of_c(const ModelParams& params, double c, QuadTolerance tol) {
    if (!(c >= 0.0))
        throw std::invalid_argument("R1_of_c: c must be nonnegative");
    const double beta_xm = params.beta_at_xm();
    const double L = params.lipschitz_L();
    const auto majorant = [&](double inner) { return beta_xm + L * inner; };
    return renewal_integral(params, majorant, c, tol);
}

std::optional<double> theta2(const ModelParams& params, QuadTolerance tol) {
    if (params.beta_at_xm() >= params.mu())
        return std::nullopt; // R1 stays >= 1 at infinity; no largest root
    QuadTolerance inner = tol;
    inner.abs_tol = std::min(tol.abs_tol, 1e-10);
    std::size_t hint = 0;
    const double beta_xm = params.beta_at_xm();
    const double L = params.lipschitz_L();
    const auto majorant = [&](double offset) { return beta_xm + L * offset; };
    auto r1 = [&](double c) {
        return renewal_integral(params, majorant, c, inner, &hint);
    };
    if (r1(0.0) <= 1.0)
        return std::nullopt;

    double hi = 1.0;
    while (r1(hi) >= 1.0 - 1e-6) {
        hi *= 2.0;
        if (hi > 1e8)
            throw std::runtime_error("theta2: bracket growth exceeded the overflow guard");
    }
    return largest_root(r1, 1.0, hi, 1e-9);
}

double G_of_x(const RateSpec& g, double x) {
    if (!(x >= 0.0))
        throw std::invalid_argument("G_of_x: x must be nonnegative");
    const auto& p = g.params();
    switch (g.family()) {
    case RateFamily::exp_decay:
        return p[0] / p[1] * (1.0 - std::exp(-p[1] * x));
    case RateFamily::rational_decay:
        return p[0] / p[1] * std::log1p(p[1] * x);
    case RateFamily::affine:
        return p[1] * x; // growth affine has slope 0
    case RateFamily::table: {
        const auto& xs = g.table_xs();
        const auto& ys = g.table_ys();
        double acc = 0.0;
        double prev_x = 0.0;
        // Left of the first node the table clamps to its first value.
        if (xs.front() > 0.0) {
            const double edge = std::min(x, xs.front());
            acc += ys.front() * edge;
            prev_x = edge;
        }
        if (x <= prev_x)
            return acc;
        for (std::size_t i = 0; i + 1 < xs.size() && prev_x < x; ++i) {
            const double lo = std::max(prev_x, xs[i]);
            const double hi = std::min(x, xs[i + 1]);
            if (hi <= lo)
                continue;
            const double v_lo = g.eval(lo);
            const double v_hi = g.eval(hi);
            acc += 0.5 * (v_lo + v_hi) * (hi - lo);
            prev_x = hi;
        }
        if (x > xs.back())
            acc += ys.back() * (x - xs.back()); // constant extrapolation
        return acc;
    }
    case RateFamily::ramp:
        break;
    }
    throw std::invalid_argument("G_of_x: not a growth-rate family");
}

double C_eps(const RateSpec& g, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("C_eps: eps must be positive");
    const auto& p = g.params();
    switch (g.family()) {
    case RateFamily::exp_decay: {
        // Stationary where g(x) = eps: x* = log(g0/eps)/k.
        if (eps >= p[0])
            return 0.0;
        const double ratio = p[0] / eps;
        return (p[0] - eps) / p[1] - eps / p[1] * std::log(ratio);
    }
    case RateFamily::rational_decay: {
        if (eps >= p[0])
            return 0.0;
        const double ratio = p[0] / eps;
        return p[0] / p[1] * std::log(ratio) - (p[0] - eps) / p[1];
    }
    case RateFamily::affine: {
        if (eps >= p[1])
            return 0.0;
        throw std::domain_error("C_eps: growth rate never falls below eps");
    }
    case RateFamily::table: {
        const auto& xs = g.table_xs();
        const auto& ys = g.table_ys();
        if (ys.back() > eps)
            throw std::domain_error("C_eps: growth rate never falls below eps");
        // G - eps x is piecewise quadratic with slope g(x) - eps; candidates
        // are the nodes plus any in-cell stationary point (g linear there).
        double best = 0.0; // x = 0 is always admissible
        auto consider = [&](double x) {
            if (x >= 0.0)
                best = std::max(best, G_of_x(g, x) - eps * x);
        };
        consider(xs.front());
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            consider(xs[i + 1]);
            const double y0 = ys[i], y1 = ys[i + 1];
            if ((y0 - eps) * (y1 - eps) < 0.0) {
                const double w = (eps - y0) / (y1 - y0);
                consider(xs[i] + w * (xs[i + 1] - xs[i]));
            }
        }
        return best;
    }
    case RateFamily::ramp:
        break;
    }
    throw std::invalid_argument("C_eps: not a growth-rate family");
}

double EnvelopeBundle::xi(double t) const {
    return alpha1 * std::exp(mu * t) + a1 * std::exp(lambda_plus * t) +
           a2 * std::exp(lambda_minus * t);
}

double EnvelopeBundle::xi_scaled(double t) const {
    return alpha1 + a1 * std::exp((lambda_plus - mu) * t) +
           a2 * std::exp((lambda_minus - mu) * t);
}

double EnvelopeBundle::sup_b_bound() const {
    return alpha1 + std::abs(a1) + std::abs(a2);
}

EnvelopeBundle growth_envelope(const ModelParams& params, double phi_norm_rho,
                               double phi_norm_mu, std::optional<double> eps) {
    const double mu = params.mu();
    const double beta_xm = params.beta_at_xm();
    const double L = params.lipschitz_L();
    if (!(beta_xm < mu))
        throw std::domain_error(
            "growth_envelope: requires beta(x_m) < mu (unsupported regime)");
    if (phi_norm_rho < 0.0 || phi_norm_mu < 0.0)
        throw std::invalid_argument("growth_envelope: norms must be nonnegative");

    double e = eps.value_or(
        L > 0.0 ? std::min(0.5, 0.5 * mu * (mu - beta_xm) / L) : 0.5);
    if (!(e > 0.0 && e < 1.0))
        throw std::invalid_argument("growth_envelope: eps must lie in (0,1)");
    const double denom = mu * mu - mu * beta_xm - e * L;
    if (!(denom > 0.0))
        throw std::invalid_argument(
            "growth_envelope: eps too large; mu^2 - mu beta(x_m) - eps L must stay positive");

    EnvelopeBundle env;
    env.mu = mu;
    env.eps = e;
    env.C_eps = C_eps(params.g(), e);
    env.A_bound = (beta_xm + L / (mu - params.rho())) * phi_norm_rho +
                  L * env.C_eps / mu;
    env.alpha1 = mu * L * env.C_eps / denom;
    const double disc = std::sqrt(beta_xm * beta_xm + 4.0 * e * L);
    env.lambda_plus = 0.5 * (beta_xm + disc);
    env.lambda_minus = 0.5 * (beta_xm - disc);

    // a1 + a2 = A - alpha1 and lambda+ a1 + lambda- a2 = xi'(0) - alpha1 mu,
    // with xi'(0) = eps L |phi|_mu + L C_eps + beta(x_m) A.
    const double rhs1 = env.A_bound - env.alpha1;
    const double rhs2 = -env.alpha1 * mu + e * L * phi_norm_mu +
                        L * env.C_eps + beta_xm * env.A_bound;
    const double gap = env.lambda_plus - env.lambda_minus;
    if (gap > 1e-300) {
        env.a1 = (rhs2 - env.lambda_minus * rhs1) / gap;
        env.a2 = rhs1 - env.a1;
    } else {
        // Degenerate only when L = 0 and beta(x_m) = 0: beta vanishes
        // identically, the envelope collapses to the A-bound.
        env.a1 = 0.0;
        env.a2 = rhs1;
    }
    return env;
}

double derivative_bound(const ModelParams& params, double phi_norm_rho,
                        double solution_bound) {
    if (phi_norm_rho < 0.0 || solution_bound < 0.0)
        throw std::invalid_argument("derivative_bound: inputs must be nonnegative");
    const double mu = params.mu();
    const double beta_xm = params.beta_at_xm();
    const double L = params.lipschitz_L();
    return (mu - beta_xm) * solution_bound +
           L * params.g_sup() * (phi_norm_rho + solution_bound / mu);
}

std::string to_string(TrichotomyCase c) {
    switch (c) {
    case TrichotomyCase::ConvergentA: return "ConvergentA";
    case TrichotomyCase::UnboundedB: return "UnboundedB";
    case TrichotomyCase::ExtinctC: return "ExtinctC";
    }
    return "unknown";
}

AnalysisReport classify(const ModelParams& params, QuadTolerance tol) {
    AnalysisReport report;
    report.R0 = basic_reproduction_number(params, tol);
    report.beta_at_xm = params.beta_at_xm();
    report.mu = params.mu();
    report.hypothesis_M = check_hypothesis_M(params).satisfied();

    // Outside the monotone hypothesis the response R need not decrease, and
    // the bracket scans inside the equilibrium searches can exhaust their
    // guards.  Classification stays useful as triage, so record the failed
    // search instead of aborting.
    std::string search_note;
    const auto guarded = [&](auto&& search) -> std::optional<double> {
        try {
            return search();
        } catch (const std::runtime_error&) {
            search_note = "equilibrium search exhausted its bracket; "
                          "no fixed point recorded";
            return std::nullopt;
        }
    };

    if (report.R0 > 1.0 && report.beta_at_xm < params.mu()) {
        report.kind = TrichotomyCase::ConvergentA;
        report.b_star = guarded([&] { return positive_equilibrium(params, tol); });
        report.theta2 = guarded([&] { return theta2(params, tol); });
    } else if (report.R0 > 1.0) {
        report.kind = TrichotomyCase::UnboundedB;
    } else {
        report.kind = TrichotomyCase::ExtinctC;
        if (params.beta_at_xm() < params.mu())
            report.theta2 =
                guarded([&] { return theta2(params, tol); }); // majorant ceiling
    }

    if (!report.hypothesis_M)
        report.notes = "monotone hypothesis fails; classification is advisory";
    if (!search_note.empty()) {
        if (!report.notes.empty())
            report.notes += "; ";
        report.notes += search_note;
    }
    return report;
}

} // namespace forest
