#pragma once

// Forward solver for the birth-rate renewal equation with infinite memory,
// plus the two quadrature forms of the one-step operator F.  The scheme is
// the O(N^2) state-reduction method: the cumulative weighted mass P(a)
// collapses the nested history integrals, an incrementally updated cache
// holds the inner growth integrals, and the endpoint term is solved in
// closed form each step.

#include "forest/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace forest {

struct SolverConfig {
    double h = 0.02;         // time step
    double T = 40.0;         // horizon, integer multiple of h
    double trunc_tol = 1e-10; // budget for the neglected far-past mass
    double picard_tol = 1e-12; // audit threshold for the per-step residual
    int picard_max = 3;        // audit sweeps if the residual exceeds the threshold
};

struct SolutionPath {
    std::vector<double> t;        // grid 0, h, ..., T
    std::vector<double> b;        // birth rate; b[0] is the right limit at 0
    std::vector<double> P;        // cumulative weighted mass int_{-inf}^{t} e^{mu s} b ds
    std::vector<double> residual; // per-step fixed-point defect
    double h = 0.0;
    std::size_t clamp_count = 0; // negative-roundoff clamps (reported, not hidden)

    [[nodiscard]] double max_residual() const;
    [[nodiscard]] double max_b() const;
};

// Advances the renewal equation from the history phi over [0, T].
// Preconditions: phi.step() == cfg.h, T an integer multiple of h, and
// (h/2) beta(x_m) < 1 (endpoint solvability) — violations throw
// std::invalid_argument.
[[nodiscard]] SolutionPath solve_ivp(const ModelParams& params, const History& phi,
                                     const SolverConfig& cfg);

// History-only forcing term of the Volterra split at time t >= 0: the part
// of the renewal integral carried entirely by phi.  r_phi_at(params, phi, 0)
// equals apply_F(params, phi).
[[nodiscard]] double r_phi_at(const ModelParams& params, const History& phi,
                              double t, double trunc_tol = 1e-10);

struct ApplyFOptions {
    int refine = 1;          // quadrature subdivisions per history step
    bool richardson = false; // extrapolate the refine and 2*refine values
    double trunc_tol = 1e-10;
};

// The operator F applied to a history, evaluated in the natural variables:
//   int_{-inf}^0 beta(x_m + int_u^0 g(e^{-mu s} H(u)) ds) h(u) du
// with h(u) = phi(u) e^{mu u} and H(u) the cumulative weighted mass.
[[nodiscard]] double apply_F(const ModelParams& params, const History& phi,
                             const ApplyFOptions& opts = {});

// The same operator after the change of variables theta = H(u):
//   int_0^{H(0)} beta(x_m + int_{H^{-1}(theta)}^0 g(e^{-mu s} theta) ds) dtheta,
// integrated on a geometric graded mesh toward the (integrable) endpoint
// singularity at theta = 0, with the mesh aligned to the nodal values of H.
// Serves as the independent oracle for apply_F.
[[nodiscard]] double apply_F_change_of_vars(const ModelParams& params,
                                            const History& phi,
                                            double trunc_tol = 1e-10);

// Writes "t,b,P,residual" rows in scientific notation with 12 significant
// digits.
void export_path_table(const SolutionPath& path, std::ostream& out);

} // namespace forest
