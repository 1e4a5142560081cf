#pragma once

#include <cmath>
#include <numbers>

namespace uuvsim {

/// Wraps an angle into [-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a;
}

/// Returns the representative of `a` (mod 2 pi) closest to `reference`,
/// so consecutive samples never differ by more than pi.
inline double unwrap_near(double a, double reference) {
    return reference + wrap_angle(a - reference);
}

}  // namespace uuvsim
