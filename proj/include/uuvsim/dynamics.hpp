// Underactuated vehicle model: body kinematics, five-DOF hydrodynamic
// dynamics (surge/sway/heave/pitch/yaw, no roll), the spherical
// re-parameterization of body velocity, and fixed-step integration.
#pragma once

#include <Eigen/Core>

#include "uuvsim/error.hpp"
#include "uuvsim/rk4.hpp"

namespace uuvsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using StateVector = Eigen::Matrix<double, 10, 1>;

/// Rigid-body and hydrodynamic coefficients of one vehicle.
///
/// Effective masses are `mass - added_*` (and `inertia - added_*` for the
/// rotational channels); all five must be strictly positive.
struct VehicleParams {
    double mass = 10.0;
    double inertia_y = 3.0;
    double inertia_z = 2.0;

    // added-mass coefficients
    double added_u = 6.0;
    double added_v = 1.1;
    double added_w = 1.15;
    double added_q = 0.5;
    double added_r = 0.45;

    // linear damping
    double damping_u = 1.0;
    double damping_v = 1.1;
    double damping_w = 1.15;
    double damping_q = 0.2;
    double damping_r = 0.25;

    double restoring = 0.1;

    double m1() const { return mass - added_u; }
    double m2() const { return mass - added_v; }
    double m3() const { return mass - added_w; }
    double m4() const { return inertia_y - added_q; }
    double m5() const { return inertia_z - added_r; }

    /// Throws NonPositiveEffectiveMass or InvalidArgument.
    void validate() const;
};

/// Pose (earth frame) and body velocities of one vehicle.
struct VehicleState {
    Vec3 position = Vec3::Zero();       // x, y, z
    Vec2 attitude = Vec2::Zero();       // theta (pitch), psi (yaw)
    Vec3 linear_vel = Vec3::Zero();     // u, v, w
    Vec2 angular_vel = Vec2::Zero();    // q, r

    double theta() const { return attitude[0]; }
    double psi() const { return attitude[1]; }

    StateVector pack() const;
    static VehicleState unpack(const StateVector& x);
};

struct ControlInput {
    double surge = 0.0;   // tau1, N
    double pitch = 0.0;   // tau2, N m
    double yaw = 0.0;     // tau3, N m
};

/// Generalized disturbance, one entry per dynamic equation (u, v, w, q, r).
using DisturbanceVector = Vec5;

struct SphericalSpeed {
    double speed = 0.0;        // u_a
    double theta_prime = 0.0;  // flight-path pitch offset
    double psi_prime = 0.0;    // sideslip offset
    double theta_a = 0.0;
    double psi_a = 0.0;
    bool degenerate = false;   // speed below floor; offsets held
    bool clamped = false;      // an offset was pinned near +-pi/2
};

struct GuardConfig {
    double attitude_margin = 1e-3;  // rad, on cos(theta) and cos(theta')cos(psi')
    double speed_floor = 1e-6;      // m/s
};

/// Time derivative of the packed 10-state (position, attitude, body
/// velocities). Pure; throws SingularAttitude when cos(theta) <= margin.
StateVector state_derivative(const VehicleState& state, const VehicleParams& params,
                             const ControlInput& tau, const DisturbanceVector& d,
                             double attitude_margin = GuardConfig{}.attitude_margin);

/// Resultant speed and flow angles of the body velocity. Below the speed
/// floor the offsets are taken from `prev` and the result is flagged.
SphericalSpeed spherical_transform(const Vec3& linear_vel, const Vec2& attitude,
                                   const SphericalSpeed& prev = {},
                                   double speed_floor = GuardConfig{}.speed_floor);

/// Body velocity recovered from (u_a, theta', psi').
Vec3 body_velocity_from_spherical(double speed, double theta_prime, double psi_prime);

/// Earth-frame position rate in the transformed coordinates.
Vec3 transformed_kinematics(const SphericalSpeed& s);

/// One RK4 step of length `dt` starting at time `t`; `tau` is held and
/// `disturbance(t)` is sampled at each stage time.
template <typename DisturbanceFn>
VehicleState integrate_step(const VehicleState& state, const VehicleParams& params,
                            const ControlInput& tau, DisturbanceFn&& disturbance,
                            double t, double dt,
                            double attitude_margin = GuardConfig{}.attitude_margin) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "integration step must be positive");
    }
    const StateVector next = rk4_step(state.pack(), t, dt, [&](double ts, const StateVector& x) {
        return state_derivative(VehicleState::unpack(x), params, tau, disturbance(ts),
                                attitude_margin);
    });
    if (!next.allFinite()) {
        throw Error(ErrorKind::NonFinite, "integrated state is not finite");
    }
    return VehicleState::unpack(next);
}

}  // namespace uuvsim
