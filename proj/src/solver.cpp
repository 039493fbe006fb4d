#include "forest/solver.hpp"

#include "forest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace forest {

namespace {

// The truncated history grid shared by the solver and both operator forms:
// one-sided node values on [-S_eff, 0] plus the normalized weighted mass
//   phat(s) = e^{-mu s} P(s) = int_{-inf}^s e^{-mu (s-sigma)} phi(sigma) dsigma,
// which stays O(sup phi / mu) however long the window grows.
struct PastGrid {
    double step = 0.0;
    double s_eff = 0.0;             // truncated span
    std::vector<double> left, right; // one-sided values at -S_eff + i*step
    std::vector<double> phat;        // normalized mass at each node

    [[nodiscard]] std::size_t last() const { return left.size() - 1; }
};

// Cut the far past so the neglected renewal mass stays within budget: the
// integrand against a constant tail c is bounded by
// c (beta(x_m) + L g_sup (t-a)) e^{-mu (t-a)}, worst at t = 0.
double required_span(const ModelParams& params, const History& phi,
                     double trunc_tol) {
    if (phi.tail() == TailKind::zero || phi.tail_value() == 0.0)
        return phi.span();
    const double c = phi.tail_value();
    const LinearEnvelope envelope{c * params.beta_at_xm(),
                                  c * params.lipschitz_L() * params.g_sup()};
    const double needed = truncation_horizon(params.mu(), envelope, trunc_tol);
    return std::max(phi.span(), needed);
}

PastGrid build_past_grid(const ModelParams& params, const History& phi,
                         double step, double trunc_tol) {
    PastGrid grid;
    grid.step = step;

    const double span_needed = required_span(params, phi, trunc_tol);
    const auto base_nodes =
        static_cast<std::size_t>(std::round(phi.span() / step));
    std::size_t extra_nodes = 0;
    if (span_needed > phi.span())
        extra_nodes = static_cast<std::size_t>(
            std::ceil((span_needed - phi.span()) / step - 1e-9));
    const std::size_t m = base_nodes + extra_nodes;
    grid.s_eff = static_cast<double>(m) * step;

    const double tail_value =
        phi.tail() == TailKind::constant ? phi.tail_value() : 0.0;
    grid.left.resize(m + 1);
    grid.right.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        if (i < extra_nodes) {
            grid.left[i] = grid.right[i] = tail_value;
        } else if (i == extra_nodes && extra_nodes > 0) {
            // Stitch between the analytic tail and the sampled window; the
            // datum may jump here, so keep both one-sided values.
            grid.left[i] = tail_value;
            grid.right[i] = phi.at_node(0);
        } else {
            const double s = static_cast<double>(i) * step - grid.s_eff;
            grid.left[i] = grid.right[i] = phi.value_at(s);
        }
    }

    // Exact analytic tail mass, then the exp-weighted trapezoid recursion;
    // the two-sided values keep panels from averaging across jumps.
    const double mu = params.mu();
    const double decay = std::exp(-mu * step);
    grid.phat.resize(m + 1);
    grid.phat[0] = tail_value / mu;
    for (std::size_t i = 1; i <= m; ++i)
        grid.phat[i] = decay * (grid.phat[i - 1] + 0.5 * step * grid.right[i - 1]) +
                       0.5 * step * grid.left[i];
    return grid;
}

// Inner growth integrals at the initial instant: for every past node i,
//   I[i] = int_{s_i}^{0} g(e^{-mu (tau - s_i)} phat_i) dtau
// by trapezoid on the shared grid.  O(m^2) once; the solver then maintains
// these incrementally.
std::vector<double> initial_inner_integrals(const ModelParams& params,
                                            const PastGrid& grid,
                                            const std::vector<double>& powvec) {
    const std::size_t m = grid.last();
    std::vector<double> inner(m + 1, 0.0);
    for (std::size_t i = 0; i <= m; ++i) {
        const double mass = grid.phat[i];
        double acc = 0.0;
        double g_prev = params.g_of(mass); // tau = s_i
        for (std::size_t k = i + 1; k <= m; ++k) {
            const double g_here = params.g_of(powvec[k - i] * mass);
            acc += 0.5 * grid.step * (g_prev + g_here);
            g_prev = g_here;
        }
        inner[i] = acc;
    }
    return inner;
}

// The birth rate released at the initial instant: the full renewal integral
// over the truncated past, endpoint carried by the left limit phi(0).
double initial_birth(const ModelParams& params, const PastGrid& grid,
                     const std::vector<double>& powvec,
                     const std::vector<double>& inner) {
    const std::size_t m = grid.last();
    const double x_m = params.x_m();
    double sum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double f = params.beta_of(x_m + inner[i]) * powvec[m - i];
        if (i == 0)
            sum += 0.5 * f * grid.right[0];
        else if (i == m)
            sum += 0.5 * f * grid.left[m];
        else
            sum += 0.5 * f * (grid.left[i] + grid.right[i]);
    }
    return sum * grid.step;
}

std::vector<double> decay_powers(double mu, double step, std::size_t count) {
    std::vector<double> powvec(count + 1);
    for (std::size_t d = 0; d <= count; ++d)
        powvec[d] = std::exp(-mu * step * static_cast<double>(d));
    return powvec;
}

} // namespace

double SolutionPath::max_residual() const {
    double worst = 0.0;
    for (double r : residual)
        worst = std::max(worst, r);
    return worst;
}

double SolutionPath::max_b() const {
    double worst = 0.0;
    for (double v : b)
        worst = std::max(worst, v);
    return worst;
}

SolutionPath solve_ivp(const ModelParams& params, const History& phi,
                       const SolverConfig& cfg) {
    if (!(cfg.h > 0.0) || !(cfg.T > 0.0))
        throw std::invalid_argument("solve_ivp: h and T must be positive");
    if (std::abs(phi.step() - cfg.h) > 1e-12)
        throw std::invalid_argument("solve_ivp: history step must equal the solver step");
    const double steps_real = cfg.T / cfg.h;
    const auto n_steps = static_cast<std::size_t>(std::round(steps_real));
    if (std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9 || n_steps == 0)
        throw std::invalid_argument("solve_ivp: T must be a positive integer multiple of h");
    if (!(cfg.trunc_tol > 0.0))
        throw std::invalid_argument("solve_ivp: trunc_tol must be positive");
    const double beta_xm = params.beta_at_xm();
    const double endpoint_weight = 0.5 * cfg.h * beta_xm;
    if (endpoint_weight >= 1.0)
        throw std::invalid_argument(
            "solve_ivp: step too large, (h/2) beta(x_m) must stay below 1");

    PastGrid grid = build_past_grid(params, phi, cfg.h, cfg.trunc_tol);
    const std::size_t m = grid.last();
    const std::size_t total = m + n_steps;
    const double h = cfg.h;
    const double mu = params.mu();
    const double x_m = params.x_m();

    const std::vector<double> powvec = decay_powers(mu, h, total);

    // Initial quantities must be computed while the grid is still
    // history-sized: the helpers take the final node of `grid` as "now".
    std::vector<double> inner = initial_inner_integrals(params, grid, powvec);
    double b0 = initial_birth(params, grid, powvec, inner);

    std::vector<double>& left = grid.left;
    std::vector<double>& right = grid.right;
    std::vector<double>& phat = grid.phat;
    left.resize(total + 1);
    right.resize(total + 1);
    phat.resize(total + 1);
    inner.resize(total + 1, 0.0);
    std::vector<double> g_now(total + 1, 0.0);
    for (std::size_t i = 0; i <= m; ++i)
        g_now[i] = params.g_of(powvec[m - i] * phat[i]);

    SolutionPath path;
    path.h = h;
    path.t.resize(n_steps + 1);
    path.b.resize(n_steps + 1);
    path.P.resize(n_steps + 1);
    path.residual.resize(n_steps + 1, 0.0);

    // Initial instant: the whole right-hand side is known history.
    if (b0 < 0.0) {
        ++path.clamp_count;
        b0 = 0.0;
    }
    right[m] = b0; // right limit at t=0; left[m] keeps the datum phi(0)
    path.t[0] = 0.0;
    path.b[0] = b0;
    path.P[0] = phat[m];
    path.residual[0] = 0.0;

    const double decay = std::exp(-mu * h);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        const std::size_t j = m + n;

        // Advance every cached inner integral by one tau-panel.
        for (std::size_t i = 0; i < j; ++i) {
            const double g_new = params.g_of(powvec[j - i] * phat[i]);
            inner[i] += 0.5 * h * (g_now[i] + g_new);
            g_now[i] = g_new;
        }

        // Renewal sum over the past; the t_n endpoint is the only place the
        // unknown appears, with bare factor (h/2) beta(x_m).
        double sum = 0.5 * params.beta_of(x_m + inner[0]) * powvec[j] * right[0];
        for (std::size_t i = 1; i < j; ++i) {
            const double f = params.beta_of(x_m + inner[i]) * powvec[j - i];
            sum += 0.5 * f * (left[i] + right[i]);
        }
        const double rhs_past = sum * h;
        double b_n = rhs_past / (1.0 - endpoint_weight);

        // Audit the fixed point; the closed form already satisfies it, so
        // these sweeps only ever run if roundoff says otherwise.
        double res = std::abs(rhs_past + endpoint_weight * b_n - b_n);
        for (int sweep = 0; sweep < cfg.picard_max && res > cfg.picard_tol; ++sweep) {
            b_n = rhs_past + endpoint_weight * b_n;
            res = std::abs(rhs_past + endpoint_weight * b_n - b_n);
        }
        if (b_n < 0.0) {
            ++path.clamp_count;
            b_n = 0.0;
            res = std::abs(rhs_past + endpoint_weight * b_n - b_n);
        }

        left[j] = right[j] = b_n;
        phat[j] = decay * (phat[j - 1] + 0.5 * h * right[j - 1]) + 0.5 * h * b_n;
        inner[j] = 0.0;
        g_now[j] = params.g_of(phat[j]);

        const double t_n = static_cast<double>(n) * h;
        path.t[n] = t_n;
        path.b[n] = b_n;
        path.P[n] = std::exp(mu * t_n) * phat[j];
        path.residual[n] = res;
    }
    return path;
}

double r_phi_at(const ModelParams& params, const History& phi, double t,
                double trunc_tol) {
    if (!(t >= 0.0))
        throw std::invalid_argument("r_phi_at: t must be nonnegative");
    const PastGrid grid = build_past_grid(params, phi, phi.step(), trunc_tol);
    const std::size_t m = grid.last();
    const double h = grid.step;
    const double mu = params.mu();
    const double x_m = params.x_m();

    double sum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double s_i = static_cast<double>(i) * h - grid.s_eff;
        // Inner growth integral over [s_i, t] on a per-node uniform grid.
        const double width = t - s_i;
        const auto panels =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::round(width / h)));
        const double tau_step = width / static_cast<double>(panels);
        const double mass = grid.phat[i];
        double acc = 0.0;
        double g_prev = params.g_of(mass);
        for (std::size_t k = 1; k <= panels; ++k) {
            const double tau = tau_step * static_cast<double>(k);
            const double g_here = params.g_of(std::exp(-mu * tau) * mass);
            acc += 0.5 * tau_step * (g_prev + g_here);
            g_prev = g_here;
        }
        const double f = params.beta_of(x_m + acc) * std::exp(-mu * width);
        if (i == 0)
            sum += 0.5 * f * grid.right[0];
        else if (i == m)
            sum += 0.5 * f * grid.left[m];
        else
            sum += 0.5 * f * (grid.left[i] + grid.right[i]);
    }
    return sum * h;
}

double apply_F(const ModelParams& params, const History& phi,
               const ApplyFOptions& opts) {
    if (opts.refine < 1)
        throw std::invalid_argument("apply_F: refine must be at least 1");
    const auto value_at = [&](int refine) {
        const double step = phi.step() / static_cast<double>(refine);
        const PastGrid grid = build_past_grid(params, phi, step, opts.trunc_tol);
        const std::vector<double> powvec =
            decay_powers(params.mu(), step, grid.last());
        const std::vector<double> inner =
            initial_inner_integrals(params, grid, powvec);
        return initial_birth(params, grid, powvec, inner);
    };
    const double coarse = value_at(opts.refine);
    if (!opts.richardson)
        return coarse;
    const double fine = value_at(2 * opts.refine);
    return (4.0 * fine - coarse) / 3.0;
}

double apply_F_change_of_vars(const ModelParams& params, const History& phi,
                              double trunc_tol) {
    if (phi.is_identically_zero())
        return 0.0;

    const PastGrid grid = build_past_grid(params, phi, phi.step(), trunc_tol);
    const std::size_t m = grid.last();
    const double h = grid.step;
    const double mu = params.mu();
    const double x_m = params.x_m();
    const double tail_value =
        phi.tail() == TailKind::constant ? phi.tail_value() : 0.0;

    // Cumulative mass H on the natural grid (monotone nondecreasing).
    std::vector<double> mass(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double s_i = static_cast<double>(i) * h - grid.s_eff;
        mass[i] = std::exp(mu * s_i) * grid.phat[i];
    }
    const double mass0 = mass[m]; // H(0)
    if (!(mass0 > 0.0))
        return 0.0;

    // Tabulated primitive of g on a log axis:
    //   gamma(y) = int_{y_lo}^{y} g(e^v) dv,
    // so the inner integral collapses to (gamma(ln W) - gamma(ln theta)) / mu
    // with W = theta e^{-mu u(theta)} — O(1) per evaluation.
    constexpr int kPanels = 40;
    const double theta_min = mass0 * std::ldexp(1.0, -kPanels);
    const double w_max = *std::max_element(grid.phat.begin(), grid.phat.end());
    const double y_lo = std::log(theta_min) - 1e-12;
    // The inverted argument theta e^{-mu u} can overshoot the nodal masses by
    // up to a factor e^{mu h} (chord error of the inversion), so pad the top.
    const double y_hi = std::log(std::max(w_max, mass0)) + mu * h + 1e-9;
    const std::size_t table_n = std::size_t{1} << 18;
    const double dy = (y_hi - y_lo) / static_cast<double>(table_n - 1);
    std::vector<double> gamma(table_n);
    gamma[0] = 0.0;
    {
        double g_prev = params.g_of(std::exp(y_lo));
        for (std::size_t k = 1; k < table_n; ++k) {
            const double y = y_lo + dy * static_cast<double>(k);
            const double g_here = params.g_of(std::exp(y));
            gamma[k] = gamma[k - 1] + 0.5 * dy * (g_prev + g_here);
            g_prev = g_here;
        }
    }
    const auto gamma_at = [&](double y) {
        const double pos = std::clamp((y - y_lo) / dy, 0.0,
                                      static_cast<double>(table_n - 1));
        const auto k = std::min(static_cast<std::size_t>(pos), table_n - 2);
        const double w = pos - static_cast<double>(k);
        return gamma[k] + w * (gamma[k + 1] - gamma[k]);
    };

    // Integrand after the change of variables.
    const auto integrand = [&](double theta) {
        double u, w_arg;
        if (tail_value > 0.0 && theta < mass[0]) {
            // Analytic branch in the constant tail: H(u) = (c/mu) e^{mu u}.
            u = std::log(mu * theta / tail_value) / mu;
            w_arg = tail_value / mu;
        } else {
            // Piecewise-linear inversion of H on the grid.
            const auto it = std::lower_bound(mass.begin(), mass.end(), theta);
            std::size_t k = static_cast<std::size_t>(it - mass.begin());
            if (k == 0)
                k = 1;
            if (k > m)
                k = m;
            const double lo = mass[k - 1], hi = mass[k];
            const double w = hi > lo ? std::clamp((theta - lo) / (hi - lo), 0.0, 1.0)
                                     : 1.0;
            u = (static_cast<double>(k - 1) + w) * h - grid.s_eff;
            w_arg = theta * std::exp(-mu * u);
        }
        const double inner = (gamma_at(std::log(w_arg)) - gamma_at(std::log(theta))) / mu;
        return params.beta_of(x_m + inner);
    };

    // Geometric panels toward theta = 0, each cut at the nodal values of H so
    // every quadrature piece is smooth.
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const double hi = mass0 * std::ldexp(1.0, -p);
        const double lo = 0.5 * hi;
        const auto first =
            std::upper_bound(mass.begin(), mass.end(), lo) - mass.begin();
        const auto last =
            std::lower_bound(mass.begin(), mass.end(), hi) - mass.begin();
        double theta_prev = lo;
        double f_prev = integrand(lo);
        for (auto idx = first; idx < last; ++idx) {
            const double theta_here = mass[idx];
            if (theta_here <= theta_prev)
                continue;
            const double f_here = integrand(theta_here);
            total += 0.5 * (theta_here - theta_prev) * (f_prev + f_here);
            theta_prev = theta_here;
            f_prev = f_here;
        }
        const double f_hi = integrand(hi);
        total += 0.5 * (hi - theta_prev) * (f_prev + f_hi);
    }
    // The sliver (0, theta_min) is dropped; its mass is bounded by
    // theta_min * beta(x_m + g_sup |u(theta_min)|), far below trunc_tol.
    return total;
}

void export_path_table(const SolutionPath& path, std::ostream& out) {
    out << "t,b,P,residual\n";
    char row[160];
    for (std::size_t n = 0; n < path.t.size(); ++n) {
        std::snprintf(row, sizeof(row), "%.11e,%.11e,%.11e,%.11e\n", path.t[n],
                      path.b[n], path.P[n], path.residual[n]);
        out << row;
    }
}

} // namespace forest
