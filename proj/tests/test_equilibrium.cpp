#include <doctest.h>

#include "forest/equilibrium.hpp"
#include "forest/model.hpp"
#include "forest/rates.hpp"
#include "oracle_values.hpp"
#include "test_models.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace forest;

namespace {

// beta identically d: reproduction is insensitive to stand size.
ModelParams make_const_beta(double d, double mu) {
    return ModelParams(mu, 0.0, 0.5,
                       RateSpec::affine(RateRole::reproduction, 0.0, d, 0.0),
                       RateSpec::exp_decay(1.0, 1.0));
}

} // namespace

TEST_CASE("basic reproduction number matches independent quadrature") {
    CHECK(basic_reproduction_number(make_e1()) ==
          doctest::Approx(oracle::e1_R0).epsilon(1e-6));
    CHECK(basic_reproduction_number(make_ramp11()) ==
          doctest::Approx(oracle::ramp11_R0).epsilon(1e-6));
    CHECK(basic_reproduction_number(make_affine1px()) ==
          doctest::Approx(oracle::affine1px_R0).epsilon(1e-6));
    const ModelParams fast(2.0, 0.0, 0.5,
                           RateSpec::affine(RateRole::reproduction, 2.0, 0.0, 0.0),
                           RateSpec::exp_decay(1.0, 1.0));
    CHECK(basic_reproduction_number(fast) ==
          doctest::Approx(oracle::mu2_beta2x_R0).epsilon(1e-6));
}

TEST_CASE("renewal response R and its majorant R1") {
    const auto e1 = make_e1();
    SUBCASE("R(1) matches the frozen oracle") {
        CHECK(R_of_b(e1, 1.0) == doctest::Approx(oracle::e1_F_at_one).epsilon(1e-7));
    }
    SUBCASE("R is nonincreasing in the birth level") {
        const std::vector<double> grid{0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0};
        double prev = R_of_b(e1, grid.front());
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double cur = R_of_b(e1, grid[i]);
            CHECK(cur <= prev + 1e-7);
            prev = cur;
        }
    }
    SUBCASE("constant reproduction gives R = d / mu at any level") {
        const auto flat = make_const_beta(1.5, 1.0);
        CHECK(R_of_b(flat, 0.1) == doctest::Approx(1.5).epsilon(1e-7));
        CHECK(R_of_b(flat, 5.0) == doctest::Approx(1.5).epsilon(1e-7));
        CHECK(basic_reproduction_number(flat) == doctest::Approx(1.5).epsilon(1e-7));
    }
    SUBCASE("for an affine reproduction rate the majorant is the rate itself") {
        CHECK(R1_of_c(e1, 1.0) == doctest::Approx(R_of_b(e1, 1.0)).epsilon(2e-8));
    }
    SUBCASE("the majorant dominates R where the rate is genuinely nonlinear") {
        const auto ramp2 = make_ramp2();
        for (double c : {0.5, 1.0, 2.0}) {
            CHECK(R1_of_c(ramp2, c) >= R_of_b(ramp2, c) - 1e-9);
        }
        // Strict domination away from zero: the ramp sits below its chord.
        CHECK(R1_of_c(ramp2, 1.0) > R_of_b(ramp2, 1.0) + 1e-3);
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS((void)R_of_b(e1, -1.0), std::invalid_argument);
        CHECK_THROWS_AS((void)R1_of_c(e1, -1.0), std::invalid_argument);
    }
}

TEST_CASE("positive equilibrium against the frozen oracle") {
    SUBCASE("e1") {
        const auto b = positive_equilibrium(make_e1());
        REQUIRE(b.has_value());
        CHECK(*b == doctest::Approx(oracle::e1_b_star).epsilon(5e-9));
        // The fixed point actually closes the loop: R(b*) = 1.
        CHECK(R_of_b(make_e1(), *b) == doctest::Approx(1.0).epsilon(1e-7));
    }
    SUBCASE("interior-knee ramp") {
        const auto b = positive_equilibrium(make_ramp2());
        REQUIRE(b.has_value());
        CHECK(*b == doctest::Approx(oracle::ramp2_b_star).epsilon(5e-9));
    }
    SUBCASE("subcritical model has none") {
        CHECK_FALSE(positive_equilibrium(make_ramp11()).has_value());
    }
    SUBCASE("boundary reproduction at mu has none") {
        CHECK_FALSE(positive_equilibrium(make_affine1px()).has_value());
    }
}

TEST_CASE("persistence ceiling theta2") {
    SUBCASE("e1: affine rate makes the ceiling coincide with b*") {
        const auto t2 = theta2(make_e1());
        REQUIRE(t2.has_value());
        CHECK(*t2 == doctest::Approx(oracle::e1_theta2).epsilon(5e-9));
    }
    SUBCASE("interior-knee ramp: ceiling sits far above b*") {
        const auto t2 = theta2(make_ramp2());
        REQUIRE(t2.has_value());
        CHECK(*t2 == doctest::Approx(oracle::ramp2_theta2).epsilon(5e-9));
        CHECK(*t2 > oracle::ramp2_b_star + 1.0);
    }
    SUBCASE("no ceiling when the majorant response never exceeds one") {
        CHECK_FALSE(theta2(make_ramp11()).has_value());
    }
    SUBCASE("no ceiling when beta(x_m) >= mu") {
        CHECK_FALSE(theta2(make_affine1px()).has_value());
    }
}

TEST_CASE("F is strictly increasing on [0, 4 b*]") {
    const auto e1 = make_e1();
    CHECK(F_of_b(e1, 0.0) == 0.0);
    const double top = 4.0 * oracle::e1_b_star;
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double b = top * static_cast<double>(i) / 50.0;
        const double cur = F_of_b(e1, b);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("growth primitive G in closed form") {
    CHECK(G_of_x(RateSpec::exp_decay(1.0, 1.0), 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(G_of_x(RateSpec::rational_decay(1.0, 1.0), 2.0) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(G_of_x(RateSpec::affine(RateRole::growth, 0.0, 1.5, 0.0), 2.0) ==
          doctest::Approx(3.0).epsilon(1e-12));
    const auto tbl = RateSpec::table(RateRole::growth, {0.0, 2.0}, {1.0, 0.5});
    CHECK(G_of_x(tbl, 0.0) == 0.0);
    CHECK(G_of_x(tbl, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(G_of_x(tbl, 3.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)G_of_x(tbl, -1.0), std::invalid_argument);
}

TEST_CASE("linear-offset constant C_eps") {
    SUBCASE("frozen closed forms at eps = 0.1") {
        CHECK(C_eps(RateSpec::exp_decay(1.0, 1.0), 0.1) ==
              doctest::Approx(oracle::c_eps_exp11_0p1).epsilon(1e-12));
        CHECK(C_eps(RateSpec::rational_decay(1.0, 1.0), 0.1) ==
              doctest::Approx(oracle::c_eps_rat11_0p1).epsilon(1e-12));
    }
    SUBCASE("C_eps is the least linear offset: G(x) <= C + eps x, tight somewhere") {
        for (const auto& g :
             {RateSpec::exp_decay(1.0, 1.0), RateSpec::rational_decay(1.0, 1.0),
              RateSpec::table(RateRole::growth, {0.0, 2.0}, {1.0, 0.05})}) {
            const double eps = 0.1;
            const double c = C_eps(g, eps);
            double best = 0.0;
            for (int i = 0; i <= 400; ++i) {
                const double x = 10.0 * static_cast<double>(i) / 400.0;
                const double slackness = G_of_x(g, x) - eps * x;
                CHECK(slackness <= c + 1e-10);
                best = std::max(best, slackness);
            }
            CHECK(best == doctest::Approx(c).epsilon(1e-3));
        }
    }
    SUBCASE("a growth rate pinned above eps has no linear offset") {
        CHECK_THROWS_AS(
            (void)C_eps(RateSpec::affine(RateRole::growth, 0.0, 1.0, 0.0), 0.5),
            std::domain_error);
        CHECK_THROWS_AS(
            (void)C_eps(RateSpec::table(RateRole::growth, {0.0, 2.0}, {1.0, 0.5}), 0.1),
            std::domain_error);
    }
}

TEST_CASE("growth envelope bundle identities") {
    const auto e1 = make_e1();
    const double L = e1.lipschitz_L();

    SUBCASE("explicit eps = 0.1, history identically one") {
        // |phi|_rho = 1/rho = 2 and |phi|_mu = 1/mu = 1 for phi == 1.
        const auto env = growth_envelope(e1, 2.0, 1.0, 0.1);
        CHECK(env.eps == doctest::Approx(0.1));
        CHECK(env.C_eps == doctest::Approx(oracle::c_eps_exp11_0p1).epsilon(1e-12));
        CHECK(env.alpha1 == doctest::Approx(oracle::e1_alpha1_0p1).epsilon(1e-12));
        CHECK(env.lambda_plus ==
              doctest::Approx(oracle::e1_lambda_plus_0p1).epsilon(1e-12));

        // Quadratic-root identities: lambda+- solve lambda^2 = beta lambda + eps L.
        CHECK(env.lambda_plus + env.lambda_minus ==
              doctest::Approx(e1.beta_at_xm()).epsilon(1e-12).scale(1.0));
        CHECK(env.lambda_plus * env.lambda_minus ==
              doctest::Approx(-env.eps * L).epsilon(1e-12));

        // A-bound closed form.
        const double a_expected =
            (e1.beta_at_xm() + L / (e1.mu() - e1.rho())) * 2.0 + L * env.C_eps / e1.mu();
        CHECK(env.A_bound == doctest::Approx(a_expected).epsilon(1e-12));

        // The coefficients solve the initial conditions.
        CHECK(env.a1 + env.a2 == doctest::Approx(env.A_bound - env.alpha1).epsilon(1e-12));
        const double rhs2 = -env.alpha1 * e1.mu() + env.eps * L * 1.0 +
                            L * env.C_eps + e1.beta_at_xm() * env.A_bound;
        CHECK(env.lambda_plus * env.a1 + env.lambda_minus * env.a2 ==
              doctest::Approx(rhs2).epsilon(1e-12));

        // Evaluators agree with the exponential-sum reconstruction, and the
        // reported constants satisfy the comparison ODE
        //   xi'' = mu L C_eps e^{mu t} + beta(x_m) xi' + eps L xi.
        CHECK(env.xi(0.0) == doctest::Approx(env.A_bound).epsilon(1e-12));
        CHECK(env.sup_b_bound() ==
              doctest::Approx(env.alpha1 + std::abs(env.a1) + std::abs(env.a2))
                  .epsilon(1e-12));
        for (int i = 0; i < 20; ++i) {
            const double t = 3.0 * static_cast<double>(i) / 19.0;
            const double emu = std::exp(e1.mu() * t);
            const double ep = std::exp(env.lambda_plus * t);
            const double em = std::exp(env.lambda_minus * t);
            const double xi = env.alpha1 * emu + env.a1 * ep + env.a2 * em;
            CHECK(env.xi(t) == doctest::Approx(xi).epsilon(1e-12));
            CHECK(env.xi_scaled(t) ==
                  doctest::Approx(std::exp(-e1.mu() * t) * xi).epsilon(1e-12));
            const double xi_p = env.alpha1 * e1.mu() * emu +
                                env.a1 * env.lambda_plus * ep +
                                env.a2 * env.lambda_minus * em;
            const double xi_pp = env.alpha1 * e1.mu() * e1.mu() * emu +
                                 env.a1 * env.lambda_plus * env.lambda_plus * ep +
                                 env.a2 * env.lambda_minus * env.lambda_minus * em;
            const double resid = xi_pp - (e1.mu() * L * env.C_eps * emu +
                                          e1.beta_at_xm() * xi_p + env.eps * L * xi);
            CHECK(std::abs(resid) <= 1e-8 * std::max(1.0, std::abs(xi_pp)));
        }
    }

    SUBCASE("default eps keeps the denominator comfortably positive") {
        const auto env = growth_envelope(e1, 2.0, 1.0, {});
        CHECK(env.eps == doctest::Approx(0.25)); // min(0.5, 0.5*mu*(mu-0)/L)
        CHECK(env.alpha1 == doctest::Approx(4.0 * env.C_eps).epsilon(1e-12));
    }

    SUBCASE("rejects the unsupported regime and bad arguments") {
        CHECK_THROWS_AS((void)growth_envelope(make_affine1px(), 1.0, 1.0, {}),
                        std::domain_error);
        CHECK_THROWS_AS((void)growth_envelope(e1, -1.0, 1.0, {}), std::invalid_argument);
        CHECK_THROWS_AS((void)growth_envelope(e1, 2.0, 1.0, 0.51),
                        std::invalid_argument); // denominator crosses zero
        CHECK_THROWS_AS((void)growth_envelope(e1, 2.0, 1.0, 1.5),
                        std::invalid_argument); // eps outside (0,1)
    }
}

TEST_CASE("derivative bound closed form") {
    const auto e1 = make_e1();
    // (mu - beta(x_m)) B + L g_sup (|phi|_rho + B / mu) with B = 3, |phi|_rho = 2.
    CHECK(derivative_bound(e1, 2.0, 3.0) == doctest::Approx(13.0).epsilon(1e-12));
}

TEST_CASE("trichotomy classification") {
    SUBCASE("supercritical interior model converges") {
        const auto rep = classify(make_e1());
        CHECK(rep.kind == TrichotomyCase::ConvergentA);
        CHECK(rep.R0 == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(rep.beta_at_xm == 0.0);
        CHECK(rep.hypothesis_M);
        REQUIRE(rep.b_star.has_value());
        CHECK(*rep.b_star == doctest::Approx(oracle::e1_b_star).epsilon(5e-9));
        REQUIRE(rep.theta2.has_value());
        CHECK(*rep.theta2 == doctest::Approx(oracle::e1_theta2).epsilon(5e-9));
    }
    SUBCASE("boundary reproduction grows without bound") {
        const auto rep = classify(make_affine1px());
        CHECK(rep.kind == TrichotomyCase::UnboundedB);
        CHECK(rep.R0 == doctest::Approx(2.0).epsilon(1e-6));
        CHECK_FALSE(rep.b_star.has_value());
        CHECK_FALSE(rep.theta2.has_value());
    }
    SUBCASE("subcritical model dies out") {
        const auto rep = classify(make_ramp11());
        CHECK(rep.kind == TrichotomyCase::ExtinctC);
        CHECK(rep.R0 == doctest::Approx(oracle::ramp11_R0).epsilon(1e-6));
        CHECK_FALSE(rep.b_star.has_value());
    }
    SUBCASE("case labels are stable") {
        CHECK(to_string(TrichotomyCase::ConvergentA) == "ConvergentA");
        CHECK(to_string(TrichotomyCase::UnboundedB) == "UnboundedB");
        CHECK(to_string(TrichotomyCase::ExtinctC) == "ExtinctC");
    }
}
