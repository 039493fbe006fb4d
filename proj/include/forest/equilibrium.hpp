#pragma once

// Scalar-equation analysis: the per-capita offspring functional R(b), the
// basic reproduction number R(0), the positive equilibrium, the affine
// majorant R1 with its largest equilibrium theta2, the exponential growth
// envelope, the derivative bound, and the trichotomy classification.

#include "forest/model.hpp"
#include "forest/numerics.hpp"

#include <optional>
#include <string>

namespace forest {

// Expected offspring per individual when the population birth level is held
// constant at b >= 0:
//   R(b) = int_0^inf beta(x_m + int_0^a g((b/mu) e^{-mu tau}) dtau) e^{-mu a} da
// evaluated by nested trapezoid quadrature with the cumulative inner integral
// reused across the outer variable and the tail truncated against the linear
// integrand envelope.
[[nodiscard]] double R_of_b(const ModelParams& params, double b,
                            QuadTolerance tol = {});

// R(0) via the frozen-growth identity int beta(x_m + a g(0)) e^{-mu a} da;
// internally cross-checked against R_of_b(params, 0) to 1e-6 (throws
// std::logic_error on disagreement — an integrity failure, not an input
// error).
[[nodiscard]] double basic_reproduction_number(const ModelParams& params,
                                               QuadTolerance tol = {});

// F(b) = b R(b); strictly increasing under the monotone hypothesis.
[[nodiscard]] double F_of_b(const ModelParams& params, double b,
                            QuadTolerance tol = {});

// Unique positive root of R(b) = 1, present iff R(0) > 1 and beta(x_m) < mu.
// Bracket grown by doubling until R < 1, then bisected to |R - 1| <= 1e-8.
[[nodiscard]] std::optional<double>
positive_equilibrium(const ModelParams& params, QuadTolerance tol = {});

// The affine-majorant counterpart of R: beta replaced by
// beta1(x) = beta(x_m) + L (x - x_m).
[[nodiscard]] double R1_of_c(const ModelParams& params, double c,
                             QuadTolerance tol = {});

// Largest root of R1(c) = 1 when R1(0) > 1 and beta(x_m) < mu; the uniform
// upper bound on all bounded solutions.  Returns nullopt otherwise.
[[nodiscard]] std::optional<double> theta2(const ModelParams& params,
                                           QuadTolerance tol = {});

// Primitive of the growth rate: G(x) = int_0^x g(t) dt, in closed form per
// family (piecewise-quadratic for tables).
[[nodiscard]] double G_of_x(const RateSpec& g, double x);

// Least constant with G(x) <= C + eps x for all x >= 0, i.e.
// sup_{x>=0} (G(x) - eps x).  Closed form for the decay families (stationary
// where g(x) = eps); exact per-cell optimisation for tables.  Throws
// std::domain_error when g does not fall below eps at infinity (the sup is
// then infinite).
[[nodiscard]] double C_eps(const RateSpec& g, double eps);

// Exponential-sum majorant of e^{mu t} b(t):
//   xi(t) = alpha1 e^{mu t} + a1 e^{lambda_plus t} + a2 e^{lambda_minus t}.
struct EnvelopeBundle {
    double eps = 0.0;
    double C_eps = 0.0;
    double A_bound = 0.0;
    double alpha1 = 0.0;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double mu = 0.0;

    [[nodiscard]] double xi(double t) const;
    // xi(t) scaled back to the b axis: e^{-mu t} xi(t); stays bounded.
    [[nodiscard]] double xi_scaled(double t) const;
    // Flat bound on b itself: alpha1 + |a1| + |a2|.
    [[nodiscard]] double sup_b_bound() const;
};

// Builds the envelope for a history with the given weighted norms.  Requires
// beta(x_m) < mu (throws std::domain_error otherwise) and a growth rate that
// eventually falls below eps (propagated from C_eps).  When eps is absent the
// rule eps = min(0.5, 0.5 mu (mu - beta(x_m)) / L) keeps the denominator
// mu^2 - mu beta(x_m) - eps L >= 0.5 mu (mu - beta(x_m)) > 0.
[[nodiscard]] EnvelopeBundle growth_envelope(const ModelParams& params,
                                             double phi_norm_rho,
                                             double phi_norm_mu,
                                             std::optional<double> eps = {});

// Uniform bound on |b'(t)| given a bound B on the solution:
//   (mu - beta(x_m)) B + L g_sup (phi_norm_rho + B / mu).
[[nodiscard]] double derivative_bound(const ModelParams& params,
                                      double phi_norm_rho, double solution_bound);

enum class TrichotomyCase { ConvergentA, UnboundedB, ExtinctC };

[[nodiscard]] std::string to_string(TrichotomyCase c);

struct AnalysisReport {
    double R0 = 0.0;
    double beta_at_xm = 0.0;
    double mu = 0.0;
    std::optional<double> b_star;
    std::optional<double> theta2;
    TrichotomyCase kind = TrichotomyCase::ExtinctC;
    bool hypothesis_M = false;
    std::string notes;
};

// Trichotomy: R0 > 1 and beta(x_m) < mu -> ConvergentA (with b_star and
// theta2 attached); R0 > 1 and beta(x_m) >= mu -> UnboundedB; R0 <= 1 ->
// ExtinctC.  When the monotone hypothesis fails the report is advisory and
// says so in notes.
[[nodiscard]] AnalysisReport classify(const ModelParams& params,
                                      QuadTolerance tol = {});

} // namespace forest
