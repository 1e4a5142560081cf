#pragma once

namespace uuvsim {

// Classic four-stage Runge-Kutta step for any vector type supporting
// `+` and scalar `*`. `rhs(t, x)` returns dx/dt.
template <typename Vec, typename Rhs>
Vec rk4_step(const Vec& x, double t, double dt, Rhs&& rhs) {
    const Vec k1 = rhs(t, x);
    const Vec k2 = rhs(t + 0.5 * dt, Vec(x + (0.5 * dt) * k1));
    const Vec k3 = rhs(t + 0.5 * dt, Vec(x + (0.5 * dt) * k2));
    const Vec k4 = rhs(t + dt, Vec(x + dt * k3));
    return Vec(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace uuvsim
