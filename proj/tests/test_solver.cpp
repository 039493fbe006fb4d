#include <doctest.h>

#include "forest/equilibrium.hpp"
#include "forest/model.hpp"
#include "forest/solver.hpp"
#include "oracle_values.hpp"
#include "test_models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace forest;

namespace {

SolverConfig cfg(double h, double T) {
    SolverConfig c;
    c.h = h;
    c.T = T;
    return c;
}

double max_dev_from(const SolutionPath& path, double level) {
    double worst = 0.0;
    for (double v : path.b)
        worst = std::max(worst, std::abs(v - level));
    return worst;
}

} // namespace

TEST_CASE("zero history stays zero") {
    const auto path = solve_ivp(make_e1(), History::constant(0.0, 10.0, 0.02),
                                cfg(0.02, 5.0));
    CHECK(path.max_b() == 0.0);
    CHECK(path.P.back() == 0.0);
    CHECK(path.max_residual() == 0.0);
    CHECK(path.clamp_count == 0);
}

TEST_CASE("argument validation") {
    const auto e1 = make_e1();
    const auto phi = History::constant(1.0, 10.0, 0.02);
    CHECK_THROWS_AS((void)solve_ivp(e1, phi, cfg(0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_ivp(e1, phi, cfg(0.02, 0.0)), std::invalid_argument);
    // History sampled at a different step than the solver runs at.
    CHECK_THROWS_AS((void)solve_ivp(e1, phi, cfg(0.04, 1.0)), std::invalid_argument);
    // Horizon not a multiple of the step.
    CHECK_THROWS_AS((void)solve_ivp(e1, phi, cfg(0.02, 0.03)), std::invalid_argument);
    SolverConfig bad = cfg(0.02, 1.0);
    bad.trunc_tol = 0.0;
    CHECK_THROWS_AS((void)solve_ivp(e1, phi, bad), std::invalid_argument);

    // The implicit endpoint solve needs (h/2) beta(x_m) < 1.
    const auto hot = make_affine1px(); // beta(x_m) = 1
    const auto wide = History::constant(1.0, 10.0, 2.0);
    try {
        (void)solve_ivp(hot, wide, cfg(2.0, 4.0));
        FAIL("expected a step-size rejection");
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("step too large") != std::string::npos);
    }

    CHECK_THROWS_AS((void)r_phi_at(e1, phi, -1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)apply_F(e1, phi, {.refine = 0}), std::invalid_argument);
}

TEST_CASE("datum jump: b(0+) is the renewal functional, not the history edge") {
    const auto e1 = make_e1();
    const auto phi = History::constant(1.0, 10.0, 0.02);
    const auto path = solve_ivp(e1, phi, cfg(0.02, 1.0));

    // phi(0) = 1 but the right limit jumps to F(phi) = R(1) ~ 1.2642.
    CHECK(path.b[0] == doctest::Approx(oracle::e1_F_at_one).epsilon(2e-4));
    // The grid value agrees with the standalone functional to the truncation
    // budget: both sides integrate the same data with the same rule.
    CHECK(path.b[0] == doctest::Approx(apply_F(e1, phi)).epsilon(1e-9));
    // And with the shifted-kernel evaluation at t = 0.
    CHECK(r_phi_at(e1, phi, 0.0) == doctest::Approx(path.b[0]).epsilon(1e-9));
    // P(0) is the weighted history mass.
    CHECK(path.P[0] == doctest::Approx(weighted_norm(phi, e1.mu())).epsilon(1e-6));
}

TEST_CASE("equilibrium history stays put at second order") {
    const auto e1 = make_e1();
    const double b_star = oracle::e1_b_star;

    const auto path_c = solve_ivp(e1, History::constant(b_star, 10.0, 0.02),
                                  cfg(0.02, 10.0));
    const double dev_c = max_dev_from(path_c, b_star);
    CHECK(dev_c <= 2e-4);
    CHECK(path_c.clamp_count == 0);
    CHECK(path_c.max_residual() <= 1e-12 * (1.0 + path_c.max_b()));

    // Halving the step cuts the deviation by about four.
    const auto path_f = solve_ivp(e1, History::constant(b_star, 10.0, 0.04),
                                  cfg(0.04, 10.0));
    const double dev_f = max_dev_from(path_f, b_star);
    const double ratio = dev_f / dev_c;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("P bookkeeping is the exact trapezoid of e^{mu t} b") {
    const auto e1 = make_e1();
    const auto phi = History::constant(1.0, 10.0, 0.02);
    const auto path = solve_ivp(e1, phi, cfg(0.02, 10.0));
    const double h = path.h;
    for (std::size_t n = 1; n < path.t.size(); ++n) {
        const double lhs = path.P[n] - path.P[n - 1];
        const double rhs = 0.5 * h *
                           (std::exp(e1.mu() * path.t[n - 1]) * path.b[n - 1] +
                            std::exp(e1.mu() * path.t[n]) * path.b[n]);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, path.P[n]));
    }
}

TEST_CASE("renewal functional on the oscillatory archive history") {
    const auto e1 = make_e1();
    const auto phi = History::from_function(
        [](double s) { return 1.0 + 0.5 * std::sin(s); }, 40.0, 0.02,
        TailKind::constant, 1.0);

    // Plain grid evaluation lands within its O(h^2) budget of the oracle.
    CHECK(apply_F(e1, phi) == doctest::Approx(oracle::e1_apply_F_osc).epsilon(1e-4));
    // Sixteen-fold subdivision reproduces the oracle itself.
    CHECK(apply_F(e1, phi, {.refine = 16}) ==
          doctest::Approx(oracle::e1_apply_F_osc).epsilon(5e-7));
}

TEST_CASE("constant-history identity F(b) = b R(b)") {
    const auto e1 = make_e1();
    for (double b : {0.1, 1.0, 10.0}) {
        const auto phi = History::constant(b, 10.0, 0.02);
        const double via_solver = apply_F(e1, phi, {.refine = 4, .richardson = true});
        const double via_quadrature = b * R_of_b(e1, b);
        CHECK(via_solver ==
              doctest::Approx(via_quadrature).epsilon(1e-6).scale(std::max(1.0, b)));
    }
}

TEST_CASE("direct and change-of-variables evaluations agree") {
    const auto e1 = make_e1();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> level(0.5, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        const double base = level(rng);
        const double amp = base * unit(rng) * 0.8;
        const double freq = 0.5 + 2.0 * unit(rng);
        const double phase = 6.28 * unit(rng);
        const auto f = [=](double s) { return base + amp * std::sin(freq * s + phase); };
        const auto tail = (k % 2 == 0) ? TailKind::constant : TailKind::zero;
        const auto phi = History::from_function(f, 12.0, 0.01, tail,
                                                tail == TailKind::constant ? f(-12.0)
                                                                           : 0.0);
        const double direct = apply_F(e1, phi);
        const double theta = apply_F_change_of_vars(e1, phi);
        CHECK(std::abs(direct - theta) <=
              std::max(1e-6, 1e-4 * std::abs(direct)));
    }
    // Degenerate input short-circuits.
    CHECK(apply_F_change_of_vars(e1, History::constant(0.0, 5.0, 0.01)) == 0.0);
}

TEST_CASE("forcing term r_phi decays once the history ages out") {
    const auto e1 = make_e1();
    const auto phi = History::constant(1.0, 10.0, 0.02);
    const double at0 = r_phi_at(e1, phi, 0.0);
    CHECK(at0 > 1.0);
    CHECK(r_phi_at(e1, phi, 5.0) < at0);
    CHECK(r_phi_at(e1, phi, 30.0) <= 1e-8);
}

TEST_CASE("restarting from a computed segment reproduces the long run") {
    const auto e1 = make_e1();
    const double h = 0.02;
    const auto phi = History::constant(1.0, 10.0, h);
    const auto full = solve_ivp(e1, phi, cfg(h, 20.0));
    const auto first = solve_ivp(e1, phi, cfg(h, 10.0));

    // Stitch the computed segment onto the original history: samples on
    // [-20, -10] replay phi, samples on (-10, 0] replay the segment, and the
    // node at the datum jump keeps the right limit.
    const auto half = static_cast<std::size_t>(std::round(10.0 / h));
    std::vector<double> samples(2 * half + 1);
    for (std::size_t i = 0; i <= half; ++i)
        samples[i] = 1.0;
    for (std::size_t i = 0; i <= half; ++i)
        samples[half + i] = first.b[i];
    const auto stitched =
        History::sampled(std::move(samples), 20.0, h, TailKind::constant, 1.0);
    const auto second = solve_ivp(e1, stitched, cfg(h, 10.0));

    double worst_b = 0.0;
    double worst_p = 0.0;
    const double p_shift = std::exp(-e1.mu() * 10.0);
    for (std::size_t i = 0; i <= half; ++i) {
        worst_b = std::max(worst_b, std::abs(second.b[i] - full.b[half + i]));
        const double expected_p = p_shift * full.P[half + i];
        worst_p = std::max(worst_p,
                           std::abs(second.P[i] - expected_p) / std::max(1.0, expected_p));
    }
    CHECK(worst_b <= 5e-3);
    CHECK(worst_p <= 1e-4);
}

TEST_CASE("a localized pulse still ignites the stand") {
    const auto e1 = make_e1();
    std::vector<double> samples(501, 0.0);
    samples[498] = 0.1;
    samples[499] = 0.2;
    samples[500] = 0.1;
    const auto phi = History::sampled(std::move(samples), 10.0, 0.02, TailKind::zero);
    const auto path = solve_ivp(e1, phi, cfg(0.02, 20.0));
    CHECK(path.b[0] > 0.0);
    CHECK(path.b.back() > 0.0);
    // Bounded by the persistence ceiling along the way.
    CHECK(path.max_b() <= oracle::e1_theta2 * 1.001);
    for (double v : path.b)
        CHECK(v >= 0.0);
}

TEST_CASE("path export format") {
    const auto path = solve_ivp(make_e1(), History::constant(1.0, 10.0, 0.02),
                                cfg(0.02, 1.0));
    std::ostringstream out;
    export_path_table(path, out);
    const std::string text = out.str();
    CHECK(text.rfind("t,b,P,residual\n", 0) == 0);
    CHECK(text.find("nan") == std::string::npos);
    const auto rows = static_cast<std::size_t>(
        std::count(text.begin(), text.end(), '\n'));
    CHECK(rows == path.t.size() + 1);
    // Fixed-width scientific notation keeps the files diffable.
    CHECK(text.find("0.00000000000e+00,") != std::string::npos);
}
