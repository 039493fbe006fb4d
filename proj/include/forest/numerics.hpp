#pragma once

// Shared quadrature and root-finding engines with explicit, auditable
// truncation-error budgets.  Everything here is a pure function over its
// arguments; no shared state, safe to call concurrently.

#include <functional>
#include <optional>
#include <span>

namespace forest {

// Tolerance knobs for iteratively refined scalar integrals.
struct QuadTolerance {
    double abs_tol = 1e-8;     // stop when successive refinements differ by less
    int max_subdivisions = 24; // hard cap on doubling rounds
};

// Composite trapezoid over equally spaced samples.  Exact for affine
// integrands.  Throws std::invalid_argument for fewer than 2 values or h<=0.
[[nodiscard]] double integrate_grid(std::span<const double> values, double h);

// A linear-in-x envelope offset + slope*x used to bound the integrand of
// semi-infinite integrals against (offset + slope*a) * exp(-mu*a).
struct LinearEnvelope {
    double offset = 0.0;
    double slope = 0.0;
};

// Smallest A >= 0 such that the tail integral
//   \int_A^\infty (offset + slope*a) e^{-mu a} da
//     = e^{-mu A} (offset/mu + slope (A mu + 1)/mu^2)
// is <= tol.  The tail formula is monotone decreasing in A, so the cutoff is
// located by doubling then bisection.  Returns 0 when the envelope is
// identically zero or the tail is already within budget at A=0.
[[nodiscard]] double truncation_horizon(double mu, LinearEnvelope bound, double tol);

// Closed-form value of the tail integral above; exposed so callers and tests
// can audit the budget directly.
[[nodiscard]] double linear_envelope_tail(double mu, LinearEnvelope bound, double a);

// Bisection for f(x) = target with f monotone on [lo, hi].  Stops when
// |f(mid) - target| <= tol or the bracket width falls below tol.  Throws
// std::domain_error when [lo, hi] does not bracket the target.
[[nodiscard]] double find_root_monotone(const std::function<double(double)>& f,
                                        double target, double lo, double hi,
                                        double tol);

// Largest solution of f(x) = target on (0, scan_from].  Requires
// f(x) < target for all sufficiently large x; scans right-to-left on a
// geometric grid for the rightmost sign change, then bisects.  Returns
// nullopt when no crossing exists down to 0.
[[nodiscard]] std::optional<double>
largest_root(const std::function<double(double)>& f, double target,
             double scan_from, double tol);

} // namespace forest
