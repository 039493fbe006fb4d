#pragma once

// The model instance: mortality, minimal size, phase-space weight and the two
// rate laws, plus the initial datum (history) and its weighted-norm
// bookkeeping.  All types are immutable after construction and safe to share
// across concurrent scenario evaluations.

#include "forest/rates.hpp"

#include <functional>
#include <vector>

namespace forest {

class ModelParams {
  public:
    // Throws std::invalid_argument when a constraint fails:
    // mu > 0, x_m >= 0, 0 < rho < mu, beta is a reproduction spec with
    // beta(x_m) >= 0, g is a growth spec.
    ModelParams(double mu, double x_m, double rho, RateSpec beta, RateSpec g);

    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] double x_m() const { return x_m_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] const RateSpec& beta() const { return beta_; }
    [[nodiscard]] const RateSpec& g() const { return g_; }

    // Reproduction rate at size x (x >= x_m up to roundoff).
    [[nodiscard]] double beta_of(double x) const;
    // Reproduction rate at the minimal size; the scheme's endpoint factor.
    [[nodiscard]] double beta_at_xm() const { return beta_at_xm_; }
    // Growth rate at population pressure p >= 0.
    [[nodiscard]] double g_of(double p) const { return g_.eval(p); }

    [[nodiscard]] double lipschitz_L() const { return lipschitz_L_; }
    [[nodiscard]] double g_sup() const { return g_sup_; }
    [[nodiscard]] double g_at_zero() const { return g_at_zero_; }

  private:
    double mu_, x_m_, rho_;
    RateSpec beta_, g_;
    double beta_at_xm_, lipschitz_L_, g_sup_, g_at_zero_;
};

enum class TailKind { zero, constant };

// The initial datum on (-infinity, 0]: equally spaced samples on [-S, 0]
// plus an analytic tail on (-infinity, -S).  Samples are nonnegative; both
// tail modes keep every weighted norm finite and exactly integrable.
class History {
  public:
    // phi == level on all of (-infinity, 0].
    [[nodiscard]] static History constant(double level, double span, double step);
    // Samples at s = -span, -span+step, ..., 0 with the given tail.
    [[nodiscard]] static History sampled(std::vector<double> samples, double span,
                                         double step, TailKind tail,
                                         double tail_value = 0.0);
    // Sample f on the grid (f takes s <= 0).
    [[nodiscard]] static History from_function(const std::function<double(double)>& f,
                                               double span, double step,
                                               TailKind tail, double tail_value = 0.0);

    [[nodiscard]] double span() const { return span_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] const std::vector<double>& samples() const { return samples_; }
    [[nodiscard]] TailKind tail() const { return tail_; }
    [[nodiscard]] double tail_value() const { return tail_value_; }

    // Value at node index i, where i = 0 is s = -span and the last index is
    // s = 0.
    [[nodiscard]] double at_node(std::size_t i) const { return samples_[i]; }
    [[nodiscard]] std::size_t node_count() const { return samples_.size(); }

    // Piecewise-linear value at any s in [-span, 0]; tail value below -span.
    [[nodiscard]] double value_at(double s) const;

    [[nodiscard]] double max_sample() const;
    [[nodiscard]] bool is_identically_zero() const;

    // Resample onto a finer/coarser grid with the same span (piecewise-linear
    // in between; exact when the new step divides the old one).
    [[nodiscard]] History resampled(double new_step) const;

  private:
    History(std::vector<double> samples, double span, double step, TailKind tail,
            double tail_value);

    std::vector<double> samples_;
    double span_, step_;
    TailKind tail_;
    double tail_value_;
};

// |phi|_q = int_{-inf}^0 phi(s) e^{qs} ds for q > 0: trapezoid over the
// sampled window plus the exact tail term (a constant tail c contributes
// c e^{-qS}/q).  Throws std::invalid_argument for q <= 0.
[[nodiscard]] double weighted_norm(const History& phi, double q);

// Report on the monotone-regime hypothesis: reproduction nondecreasing,
// growth nonincreasing with vanishing limit.  Analytic families are decided
// from their parameters; tables from their nodes; `grid` extra geometric
// sample points cross-check the family answer.
struct HypothesisReport {
    bool beta_increasing = false;
    bool g_decreasing = false;
    bool g_vanishes = false;

    [[nodiscard]] bool satisfied() const {
        return beta_increasing && g_decreasing && g_vanishes;
    }
};

[[nodiscard]] HypothesisReport check_hypothesis_M(const ModelParams& params,
                                                  int grid = 256);

} // namespace forest
