#include "forest/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace forest {

double integrate_grid(std::span<const double> values, double h) {
    if (values.size() < 2)
        throw std::invalid_argument("integrate_grid: need at least 2 samples");
    if (!(h > 0.0))
        throw std::invalid_argument("integrate_grid: step must be positive");
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        sum += values[i];
    return sum * h;
}

double linear_envelope_tail(double mu, LinearEnvelope bound, double a) {
    return std::exp(-mu * a) *
           (bound.offset / mu + bound.slope * (a * mu + 1.0) / (mu * mu));
}

double truncation_horizon(double mu, LinearEnvelope bound, double tol) {
    if (!(mu > 0.0))
        throw std::invalid_argument("truncation_horizon: mu must be positive");
    if (!(tol > 0.0))
        throw std::invalid_argument("truncation_horizon: tol must be positive");
    if (bound.offset < 0.0 || bound.slope < 0.0)
        throw std::invalid_argument("truncation_horizon: envelope must be nonnegative");
    if (bound.offset == 0.0 && bound.slope == 0.0)
        return 0.0;
    if (linear_envelope_tail(mu, bound, 0.0) <= tol)
        return 0.0;

    double hi = 1.0;
    while (linear_envelope_tail(mu, bound, hi) > tol) {
        hi *= 2.0;
        if (hi > 1e6)
            throw std::runtime_error("truncation_horizon: cutoff exceeds 1e6");
    }
    double lo = hi * 0.5;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (linear_envelope_tail(mu, bound, mid) <= tol)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double find_root_monotone(const std::function<double(double)>& f, double target,
                          double lo, double hi, double tol) {
    if (!(lo < hi))
        throw std::invalid_argument("find_root_monotone: empty bracket");
    const double flo = f(lo) - target;
    const double fhi = f(hi) - target;
    if (flo * fhi > 0.0)
        throw std::domain_error("find_root_monotone: bracket does not straddle target");
    // An exact hit at an endpoint leaves nothing to bracket.
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    // Bracketed secant with the Illinois anti-stagnation rule: when an
    // endpoint survives two updates in a row its residual is halved, which
    // keeps superlinear convergence without ever leaving the bracket.
    double a = lo, b = hi, fa = flo, fb = fhi;
    double x = 0.5 * (a + b);
    int retained = 0; // -1 while `a` keeps moving, +1 while `b` does
    for (int iter = 0; iter < 200; ++iter) {
        const double denom = fb - fa;
        x = denom != 0.0 ? (a * fb - b * fa) / denom : 0.5 * (a + b);
        const double inner_lo = std::min(a, b), inner_hi = std::max(a, b);
        if (!(x > inner_lo) || !(x < inner_hi))
            x = 0.5 * (a + b);
        const double fx = f(x) - target;
        if (std::abs(fx) <= tol || std::abs(b - a) <= tol)
            return x;
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
            if (retained == -1)
                fb *= 0.5;
            retained = -1;
        } else {
            b = x;
            fb = fx;
            if (retained == +1)
                fa *= 0.5;
            retained = +1;
        }
    }
    return x;
}

std::optional<double> largest_root(const std::function<double(double)>& f,
                                   double target, double scan_from, double tol) {
    if (!(scan_from > 0.0))
        throw std::invalid_argument("largest_root: scan_from must be positive");

    // Right-to-left geometric scan for the rightmost crossing.  The caller
    // guarantees f < target beyond scan_from, so the first grid point at or
    // above the target closes a bracket with its right neighbour.
    constexpr double kShrink = 0.9;
    const double floor = scan_from * 1e-12;
    double right = scan_from;
    if (f(right) >= target)
        throw std::domain_error("largest_root: f(scan_from) must lie below target");
    double left = right * kShrink;
    while (left > floor) {
        const double f_left = f(left);
        if (f_left >= target) {
            return find_root_monotone(f, target, left, right, tol);
        }
        right = left;
        left *= kShrink;
    }
    // Geometric grid never reaches 0; close the last bracket against x=0.
    if (f(0.0) >= target)
        return find_root_monotone(f, target, 0.0, right, tol);
    return std::nullopt;
}

} // namespace forest
