#pragma once

// Certifiers: numerical evidence for the model's dynamical claims, checked
// against computed paths.  Every certifier is deterministic given its inputs
// and pure over immutable data; batteries may fan out concurrently.

#include "forest/equilibrium.hpp"
#include "forest/solver.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace forest {

enum class Verdict { pass, fail, skipped };

[[nodiscard]] std::string to_string(Verdict v);

struct CertificationResult {
    std::string check_name;
    Verdict verdict = Verdict::skipped;
    std::string reason;    // populated for skips and as a short fail note
    double witness_t = 0.0; // worst-case time
    double witness_lhs = 0.0;
    double witness_rhs = 0.0;
    double margin = 0.0;   // rhs - lhs at the worst point (negative on fail)
    std::string detail;    // extra reported quantities (floors, gaps)
};

// Tolerance and battery knobs; defaults match the desk-scale checks.
struct CertifyConfig {
    SolverConfig solver;
    double terminal_tol = 1e-3;      // convergent-case terminal gap
    double extinct_tol = 1e-4;       // extinct-case terminal level
    double unbounded_factor = 10.0;  // growth factor certified as "unbounded"
    double growth_slack = 1e-9;      // non-decrease slack for the growth case
    double order_slack = 1e-8;       // monotone order preservation slack
    double envelope_slack = 1e-6;    // relative envelope slack
    double envelope_abs = 1e-9;      // absolute envelope slack
    double ultimate_slack = 1e-3;
    double box_slack = 1e-3;
    double burn_in = 0.5;            // fraction of the path discarded
    double window_fraction = 0.25;   // trailing window for the ultimate bound
};

// Envelope domination: e^{mu t} b(t) <= xi(t) (1 + slack) + abs_slack at every
// node, plus the flat bound b <= alpha1 + |a1| + |a2| under the same slack.
[[nodiscard]] CertificationResult
check_envelope(const SolutionPath& path, const EnvelopeBundle& env, double mu,
               double slack = 1e-6, double abs_slack = 1e-9);

// Ultimate bound: the max of b over the trailing window is <= alpha1 (1+slack).
// Skipped (with the required horizon in `reason`) unless the transient has
// decayed: e^{(lambda_plus - mu) T} <= 1e-3.
[[nodiscard]] CertificationResult
check_ultimate_bound(const SolutionPath& path, const EnvelopeBundle& env,
                     double mu, double window_fraction = 0.25,
                     double slack = 1e-3);

// Attractor box: post-burn-in values lie in [floor, theta2 (1+slack)] with a
// strictly positive empirical floor (reported as the persistence estimate).
// Skipped for the zero path.
[[nodiscard]] CertificationResult
check_attractor_box(const SolutionPath& path, double theta2_value,
                    std::optional<double> b_star, double burn_in = 0.5,
                    double slack = 1e-3);

// Interval squeeze: F(m) <= m (1+tol) and M <= F(M) (1+tol) for the
// post-burn-in extremes [m, M]; under the monotone hypothesis with R(0) > 1
// the fixed-point gap max(|m - b*|, |M - b*|) is reported in `detail`.
[[nodiscard]] CertificationResult check_squeeze(double m, double big_m,
                                                const ModelParams& params,
                                                double tol = 1e-3);

// Eventual positivity: b(T) > 0 whenever the history is not identically
// zero.  Skipped when the growth rate can vanish at infinity and the path is
// not bounded (the hypothesis split of the positivity claim).
[[nodiscard]] CertificationResult check_positivity(const SolutionPath& path,
                                                   const ModelParams& params,
                                                   const History& phi);

// Per-scenario desk-scale certification of the trichotomy: convergence to
// b* / monotone unbounded growth / extinction, one result per history.
[[nodiscard]] std::vector<CertificationResult>
certify_classification(const ModelParams& params,
                       const std::vector<History>& scenarios,
                       const CertifyConfig& cfg);

// Order preservation under the monotone hypothesis: phi1 <= phi2 samplewise
// must give b1 <= b2 + slack at every node.
[[nodiscard]] CertificationResult
check_monotone_order(const ModelParams& params, const History& phi_low,
                     const History& phi_high, const SolverConfig& solver,
                     double slack = 1e-8);

// The same model with the reproduction rate replaced by its affine majorant
// through (x_m, beta(x_m)) with slope L.
[[nodiscard]] ModelParams majorant_params(const ModelParams& params);

// Majorant domination: the majorant-model solve bounds the original solve
// from above at every node (slack as for order preservation).
[[nodiscard]] CertificationResult
check_majorant_domination(const ModelParams& params, const History& phi,
                          const SolverConfig& solver, double slack = 1e-8);

// A deterministic ordered pair phi_low <= phi_high of smooth nonnegative
// histories with constant tails, drawn from the given generator.
[[nodiscard]] std::pair<History, History>
ordered_history_pair(std::mt19937_64& rng, double span, double step);

// Grid-refinement study: level k runs at h/2^k, errors are measured against
// a reference run at one eighth of the finest step, on the shared coarse
// nodes with the first cell [0, h] excluded (the datum may jump at 0).
struct ConvergenceRow {
    double h = 0.0;
    double max_err = 0.0;
    double ratio = 0.0;      // error of the previous (coarser) level / this one
    bool ratio_defined = false;
};

[[nodiscard]] std::vector<ConvergenceRow>
convergence_study(const ModelParams& params, const History& phi,
                  const SolverConfig& cfg, int levels);

} // namespace forest
