#include "forest/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forest {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok)
        throw std::invalid_argument(msg);
}

std::size_t node_count_for(double span, double step) {
    require(span > 0.0, "History: span must be positive");
    require(step > 0.0, "History: step must be positive");
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    require(std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio),
            "History: span must be an integer multiple of step");
    return static_cast<std::size_t>(rounded) + 1;
}

} // namespace

ModelParams::ModelParams(double mu, double x_m, double rho, RateSpec beta, RateSpec g)
    : mu_(mu), x_m_(x_m), rho_(rho), beta_(std::move(beta)), g_(std::move(g)),
      beta_at_xm_(0.0), lipschitz_L_(0.0), g_sup_(0.0), g_at_zero_(0.0) {
    require(mu_ > 0.0, "ModelParams: mu must be positive");
    require(x_m_ >= 0.0, "ModelParams: x_m must be nonnegative");
    require(rho_ > 0.0 && rho_ < mu_, "ModelParams: rho must lie in (0, mu)");
    require(beta_.role() == RateRole::reproduction,
            "ModelParams: beta must be a reproduction spec");
    require(g_.role() == RateRole::growth, "ModelParams: g must be a growth spec");
    if (beta_.family() == RateFamily::ramp)
        require(beta_.params()[1] >= x_m_, "ModelParams: ramp knee must be >= x_m");
    if (beta_.family() == RateFamily::affine)
        require(std::abs(beta_.params()[2] - x_m_) <= 1e-12,
                "ModelParams: affine reproduction must be anchored at x_m");
    beta_at_xm_ = beta_.eval(x_m_);
    require(beta_at_xm_ >= 0.0, "ModelParams: beta(x_m) must be nonnegative");
    lipschitz_L_ = beta_.lipschitz_bound();
    require(std::isfinite(lipschitz_L_), "ModelParams: beta needs a finite Lipschitz bound");
    g_sup_ = g_.sup_value();
    require(std::isfinite(g_sup_) && g_sup_ > 0.0,
            "ModelParams: g must be bounded and positive");
    g_at_zero_ = g_.eval(0.0);
}

double ModelParams::beta_of(double x) const {
    if (x < x_m_ - 1e-9)
        throw std::domain_error("ModelParams: reproduction rate evaluated below x_m");
    return beta_.eval(std::max(x, x_m_));
}

History::History(std::vector<double> samples, double span, double step,
                 TailKind tail, double tail_value)
    : samples_(std::move(samples)), span_(span), step_(step), tail_(tail),
      tail_value_(tail_value) {
    require(samples_.size() == node_count_for(span_, step_),
            "History: sample count does not match span/step");
    for (double v : samples_)
        require(std::isfinite(v) && v >= 0.0, "History: samples must be nonnegative");
    if (tail_ == TailKind::zero)
        tail_value_ = 0.0;
    require(tail_value_ >= 0.0, "History: tail value must be nonnegative");
}

History History::constant(double level, double span, double step) {
    require(level >= 0.0, "History: constant level must be nonnegative");
    std::vector<double> samples(node_count_for(span, step), level);
    return History(std::move(samples), span, step, TailKind::constant, level);
}

History History::sampled(std::vector<double> samples, double span, double step,
                         TailKind tail, double tail_value) {
    return History(std::move(samples), span, step, tail, tail_value);
}

History History::from_function(const std::function<double(double)>& f, double span,
                               double step, TailKind tail, double tail_value) {
    const std::size_t n = node_count_for(span, step);
    std::vector<double> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = -span + static_cast<double>(i) * step;
        samples[i] = f(std::min(s, 0.0));
    }
    return History(std::move(samples), span, step, tail, tail_value);
}

double History::value_at(double s) const {
    if (s <= -span_)
        return (s == -span_) ? samples_.front() : tail_value_;
    if (s >= 0.0)
        return samples_.back();
    const double pos = (s + span_) / step_;
    const auto i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    if (i + 1 >= samples_.size())
        return samples_.back();
    return samples_[i] + w * (samples_[i + 1] - samples_[i]);
}

double History::max_sample() const {
    double top = tail_ == TailKind::constant ? tail_value_ : 0.0;
    for (double v : samples_)
        top = std::max(top, v);
    return top;
}

bool History::is_identically_zero() const {
    if (tail_ == TailKind::constant && tail_value_ > 0.0)
        return false;
    return std::all_of(samples_.begin(), samples_.end(),
                       [](double v) { return v == 0.0; });
}

History History::resampled(double new_step) const {
    const std::size_t n = node_count_for(span_, new_step);
    std::vector<double> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = -span_ + static_cast<double>(i) * new_step;
        samples[i] = value_at(s);
    }
    return History(std::move(samples), span_, new_step, tail_, tail_value_);
}

double weighted_norm(const History& phi, double q) {
    if (!(q > 0.0))
        throw std::invalid_argument(
            "weighted_norm: weight must be positive (constant tails diverge otherwise)");
    const double h = phi.step();
    const std::size_t n = phi.node_count();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = -phi.span() + static_cast<double>(i) * h;
        const double term = phi.at_node(i) * std::exp(q * s);
        sum += (i == 0 || i + 1 == n) ? 0.5 * term : term;
    }
    double norm = sum * h;
    if (phi.tail() == TailKind::constant)
        norm += phi.tail_value() * std::exp(-q * phi.span()) / q;
    return norm;
}

HypothesisReport check_hypothesis_M(const ModelParams& params, int grid) {
    HypothesisReport report;
    report.beta_increasing = params.beta().is_nondecreasing();
    report.g_decreasing = params.g().is_nonincreasing();
    report.g_vanishes = params.g().limit_at_infinity() == 0.0;

    // Cross-check the symbolic answers by sampling on a geometric grid; this
    // guards table edge cases and keeps the report honest for any family.
    if (grid > 1) {
        const double cutoff = 64.0 * (1.0 + 1.0 / params.mu());
        double prev_x = 0.0;
        double prev_beta = params.beta_of(params.x_m());
        double prev_g = params.g_of(0.0);
        for (int k = 1; k <= grid; ++k) {
            const double x = cutoff * (std::pow(1.05, k) - 1.0) / (std::pow(1.05, grid) - 1.0);
            if (x <= prev_x)
                continue;
            const double b = params.beta_of(params.x_m() + x);
            const double gv = params.g_of(x);
            if (b < prev_beta - 1e-12)
                report.beta_increasing = false;
            if (gv > prev_g + 1e-12)
                report.g_decreasing = false;
            prev_x = x;
            prev_beta = b;
            prev_g = gv;
        }
    }
    return report;
}

} // namespace forest
