#include "forest/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok)
        throw std::invalid_argument("RateSpec: " + msg);
}

} // namespace

std::string to_string(RateFamily family) {
    switch (family) {
    case RateFamily::ramp: return "ramp";
    case RateFamily::affine: return "affine";
    case RateFamily::table: return "table";
    case RateFamily::exp_decay: return "exp_decay";
    case RateFamily::rational_decay: return "rational_decay";
    }
    return "unknown";
}

RateSpec::RateSpec(RateFamily family, RateRole role, std::vector<double> params)
    : family_(family), role_(role), params_(std::move(params)) {}

RateSpec::RateSpec(RateRole role, std::vector<double> xs, std::vector<double> ys)
    : family_(RateFamily::table), role_(role), xs_(std::move(xs)), ys_(std::move(ys)) {}

RateSpec RateSpec::ramp(double c, double x_knee) {
    require(c > 0.0, "ramp needs a positive slope");
    require(x_knee >= 0.0, "ramp knee must be nonnegative");
    // A ramp touches 0 left of its knee, so it cannot serve as a growth rate
    // (growth must stay strictly positive).
    return RateSpec(RateFamily::ramp, RateRole::reproduction, {c, x_knee});
}

RateSpec RateSpec::affine(RateRole role, double slope, double intercept, double x_ref) {
    require(slope >= 0.0, "affine slope must be nonnegative");
    require(intercept >= 0.0, "affine intercept must be nonnegative");
    require(x_ref >= 0.0, "affine domain edge must be nonnegative");
    if (role == RateRole::growth) {
        require(slope == 0.0, "a growth rate must be bounded; affine growth needs slope 0");
        require(intercept > 0.0, "a growth rate must be strictly positive");
    }
    return RateSpec(RateFamily::affine, role, {slope, intercept, x_ref});
}

RateSpec RateSpec::table(RateRole role, std::vector<double> xs, std::vector<double> ys) {
    require(xs.size() >= 2, "table needs at least 2 nodes");
    require(xs.size() == ys.size(), "table x/y lengths differ");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        require(xs[i] < xs[i + 1], "table abscissae must be strictly increasing");
    for (double y : ys) {
        require(std::isfinite(y), "table values must be finite");
        if (role == RateRole::growth)
            require(y > 0.0, "a growth table must be strictly positive");
        else
            require(y >= 0.0, "a reproduction table must be nonnegative");
    }
    require(xs.front() >= 0.0, "table abscissae must be nonnegative");
    return RateSpec(role, std::move(xs), std::move(ys));
}

RateSpec RateSpec::exp_decay(double level0, double decay) {
    require(level0 > 0.0, "exp_decay needs a positive level");
    require(decay > 0.0, "exp_decay needs a positive decay constant");
    return RateSpec(RateFamily::exp_decay, RateRole::growth, {level0, decay});
}

RateSpec RateSpec::rational_decay(double level0, double decay) {
    require(level0 > 0.0, "rational_decay needs a positive level");
    require(decay > 0.0, "rational_decay needs a positive decay constant");
    return RateSpec(RateFamily::rational_decay, RateRole::growth, {level0, decay});
}

double RateSpec::eval(double x) const {
    if (role_ == RateRole::growth && x < -1e-12)
        throw std::domain_error("RateSpec: growth rate evaluated at negative argument");
    switch (family_) {
    case RateFamily::ramp:
        return params_[0] * std::max(0.0, x - params_[1]);
    case RateFamily::affine: {
        if (role_ == RateRole::reproduction && x < params_[2] - 1e-9)
            throw std::domain_error("RateSpec: reproduction rate evaluated below its domain edge");
        return std::max(0.0, params_[1] + params_[0] * (x - params_[2]));
    }
    case RateFamily::table: {
        if (x <= xs_.front())
            return ys_.front();
        if (x >= xs_.back()) {
            if (role_ == RateRole::growth)
                return ys_.back(); // constant extrapolation
            const std::size_t n = xs_.size();
            const double slope =
                (ys_[n - 1] - ys_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
            return std::max(0.0, ys_.back() + slope * (x - xs_.back()));
        }
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
    }
    case RateFamily::exp_decay:
        return params_[0] * std::exp(-params_[1] * x);
    case RateFamily::rational_decay:
        return params_[0] / (1.0 + params_[1] * x);
    }
    return 0.0;
}

double RateSpec::lipschitz_bound() const {
    switch (family_) {
    case RateFamily::ramp:
        return params_[0];
    case RateFamily::affine:
        return params_[0];
    case RateFamily::table: {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
            worst = std::max(worst, std::abs((ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i])));
        return worst;
    }
    case RateFamily::exp_decay:
        return params_[0] * params_[1]; // |d/dx| maximal at 0
    case RateFamily::rational_decay:
        return params_[0] * params_[1]; // |d/dx| maximal at 0
    }
    return 0.0;
}

double RateSpec::sup_value() const {
    switch (family_) {
    case RateFamily::ramp:
        return kInf;
    case RateFamily::affine:
        return params_[0] > 0.0 ? kInf : params_[1];
    case RateFamily::table: {
        double top = *std::max_element(ys_.begin(), ys_.end());
        if (role_ == RateRole::reproduction) {
            const std::size_t n = xs_.size();
            if (ys_[n - 1] > ys_[n - 2])
                return kInf; // increasing last slope extrapolates without bound
        }
        return top;
    }
    case RateFamily::exp_decay:
    case RateFamily::rational_decay:
        return params_[0];
    }
    return 0.0;
}

double RateSpec::limit_at_infinity() const {
    switch (family_) {
    case RateFamily::ramp:
        return kInf;
    case RateFamily::affine:
        return params_[0] > 0.0 ? kInf : params_[1];
    case RateFamily::table: {
        if (role_ == RateRole::growth)
            return ys_.back();
        const std::size_t n = xs_.size();
        const double slope = (ys_[n - 1] - ys_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
        if (slope > 0.0)
            return kInf;
        if (slope < 0.0)
            return 0.0; // clamped at 0 once the extrapolation crosses it
        return ys_.back();
    }
    case RateFamily::exp_decay:
    case RateFamily::rational_decay:
        return 0.0;
    }
    return 0.0;
}

bool RateSpec::is_nondecreasing() const {
    switch (family_) {
    case RateFamily::ramp:
        return true;
    case RateFamily::affine:
        return true; // slope >= 0 by construction
    case RateFamily::table:
        for (std::size_t i = 0; i + 1 < ys_.size(); ++i)
            if (ys_[i + 1] < ys_[i])
                return false;
        return true;
    case RateFamily::exp_decay:
    case RateFamily::rational_decay:
        return false;
    }
    return false;
}

bool RateSpec::is_nonincreasing() const {
    switch (family_) {
    case RateFamily::ramp:
        return false; // positive slope beyond the knee
    case RateFamily::affine:
        return params_[0] == 0.0;
    case RateFamily::table:
        for (std::size_t i = 0; i + 1 < ys_.size(); ++i)
            if (ys_[i + 1] > ys_[i])
                return false;
        return true;
    case RateFamily::exp_decay:
    case RateFamily::rational_decay:
        return true;
    }
    return false;
}

} // namespace forest
