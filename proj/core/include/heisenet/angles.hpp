#pragma once

#include <cmath>
#include <numbers>

namespace heisenet {

inline constexpr double pi = std::numbers::pi;

/// Wrap an angle to the principal interval (-pi, pi].
inline double wrap_angle(double x) {
    double y = std::remainder(x, 2.0 * pi);
    if (y <= -pi) {
        y = pi;
    }
    return y;
}

/// Signed angular difference a - b wrapped to (-pi, pi].
inline double angle_difference(double a, double b) {
    return wrap_angle(a - b);
}

}  // namespace heisenet
