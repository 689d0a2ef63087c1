#pragma once

#include <cmath>

namespace lpm {

/// (e^x - 1)/x, continuous at 0.
inline double phi1(double x) {
    if (std::abs(x) < 1e-5) return 1.0 + x * (0.5 + x / 6.0);
    return std::expm1(x) / x;
}

/// (e^x - 1 - x)/x^2, continuous at 0.
inline double phi2(double x) {
    if (std::abs(x) < 1e-2) return 0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x / 720.0)));
    return (std::expm1(x) - x) / (x * x);
}

/// Weights of one exponential step y+ = e^x y + wl g(left) + wr g(right) over a
/// cell of width dt, exact for g linear (trapezoid), g frozen at the left node
/// (euler) or g frozen at the midpoint average (midpoint).
enum class StepRule { euler, trapezoid, midpoint };

struct StepWeights {
    double e, wl, wr;
};

inline StepWeights step_weights(StepRule rule, double x, double dt) {
    switch (rule) {
        case StepRule::euler: return {std::exp(x), dt * phi1(x), 0.0};
        case StepRule::midpoint: {
            const double w = 0.5 * dt * phi1(x);
            return {std::exp(x), w, w};
        }
        case StepRule::trapezoid:
        default: {
            const double p2 = phi2(x);
            return {std::exp(x), dt * (phi1(x) - p2), dt * p2};
        }
    }
}

}  // namespace lpm
