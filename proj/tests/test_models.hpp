#pragma once

// Shared model fixtures used across the test suite.

#include "forest/model.hpp"
#include "forest/rates.hpp"

// mu = 1, x_m = 0, rho = 0.5, beta(x) = 2x, g(x) = e^{-x}.
inline forest::ModelParams make_e1() {
    return forest::ModelParams(
        1.0, 0.0, 0.5,
        forest::RateSpec::affine(forest::RateRole::reproduction, 2.0, 0.0, 0.0),
        forest::RateSpec::exp_decay(1.0, 1.0));
}

// Subcritical ramp model: beta(x) = max(0, x - 1), otherwise as e1.
inline forest::ModelParams make_ramp11() {
    return forest::ModelParams(1.0, 0.0, 0.5, forest::RateSpec::ramp(1.0, 1.0),
                               forest::RateSpec::exp_decay(1.0, 1.0));
}

// Supercritical-at-the-boundary model: beta(x) = 1 + x, so beta(x_m) = mu.
inline forest::ModelParams make_affine1px() {
    return forest::ModelParams(
        1.0, 0.0, 0.5,
        forest::RateSpec::affine(forest::RateRole::reproduction, 1.0, 1.0, 0.0),
        forest::RateSpec::exp_decay(1.0, 1.0));
}

// Ramp with an interior knee: x_m = 0.5, beta(x) = 2 max(0, x - 1).
inline forest::ModelParams make_ramp2() {
    return forest::ModelParams(1.0, 0.5, 0.5, forest::RateSpec::ramp(2.0, 1.0),
                               forest::RateSpec::exp_decay(1.0, 1.0));
}

// e1 with a *nondecreasing* growth rate (monotone hypothesis violated).
inline forest::ModelParams make_increasing_g() {
    return forest::ModelParams(
        1.0, 0.0, 0.5,
        forest::RateSpec::affine(forest::RateRole::reproduction, 2.0, 0.0, 0.0),
        forest::RateSpec::table(forest::RateRole::growth, {0.0, 5.0, 10.0},
                                {0.5, 0.6, 0.7}));
}
