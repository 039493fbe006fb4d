#pragma once

// Rate laws for the two per-capita rates of the model: reproduction as a
// function of tree size, and growth as a function of population pressure.
// A RateSpec is an immutable value type; construction validates the shape
// constraints of its role, while monotonicity (a hypothesis, not a shape
// constraint) is reported separately by check_hypothesis_M.

#include <limits>
#include <string>
#include <vector>

namespace forest {

enum class RateFamily { ramp, affine, table, exp_decay, rational_decay };

// Which slot of the model a spec fills.  A reproduction rate maps
// [x_m, inf) -> [0, inf); a growth rate maps [0, inf) -> (0, inf).
enum class RateRole { reproduction, growth };

[[nodiscard]] std::string to_string(RateFamily family);

class RateSpec {
  public:
    // ramp: c * max{0, x - x_knee}, c > 0.
    [[nodiscard]] static RateSpec ramp(double c, double x_knee);
    // affine: intercept + slope * (x - x_ref), slope >= 0, intercept >= 0.
    // x_ref is the left edge of the domain (the model's minimal size for a
    // reproduction rate, 0 for a growth rate).
    [[nodiscard]] static RateSpec affine(RateRole role, double slope,
                                         double intercept, double x_ref);
    // table: piecewise-linear through (x_i, y_i); strictly increasing x_i.
    // Beyond the last node a reproduction table continues with its last
    // slope, a growth table stays constant at its last value.
    [[nodiscard]] static RateSpec table(RateRole role, std::vector<double> xs,
                                        std::vector<double> ys);
    // exp_decay: level0 * exp(-decay * x), level0 > 0, decay > 0.
    [[nodiscard]] static RateSpec exp_decay(double level0, double decay);
    // rational_decay: level0 / (1 + decay * x), level0 > 0, decay > 0.
    [[nodiscard]] static RateSpec rational_decay(double level0, double decay);

    [[nodiscard]] RateFamily family() const { return family_; }
    [[nodiscard]] RateRole role() const { return role_; }
    [[nodiscard]] const std::vector<double>& params() const { return params_; }

    // Value of the rate at x.  Growth rates reject x < 0; an affine
    // reproduction rate rejects x below its stored domain edge.  Other
    // families cannot see the model's domain edge and leave that check to
    // the model layer.
    [[nodiscard]] double eval(double x) const;

    // A global Lipschitz constant of the rate on its domain.
    [[nodiscard]] double lipschitz_bound() const;

    // sup of the rate over its domain (finite for every admissible growth
    // rate; +inf for unbounded reproduction families).
    [[nodiscard]] double sup_value() const;

    // Limit of the rate at +infinity (+inf for unbounded families).
    [[nodiscard]] double limit_at_infinity() const;

    // Exact monotonicity on the whole domain, decided from the family
    // parameters (nodal scan for tables).
    [[nodiscard]] bool is_nondecreasing() const;
    [[nodiscard]] bool is_nonincreasing() const;

    // Table accessors (empty for analytic families).
    [[nodiscard]] const std::vector<double>& table_xs() const { return xs_; }
    [[nodiscard]] const std::vector<double>& table_ys() const { return ys_; }

  private:
    RateSpec(RateFamily family, RateRole role, std::vector<double> params);
    RateSpec(RateRole role, std::vector<double> xs, std::vector<double> ys);

    RateFamily family_;
    RateRole role_;
    std::vector<double> params_;
    std::vector<double> xs_, ys_; // table nodes
};

} // namespace forest
