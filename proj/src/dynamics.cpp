#include "uuvsim/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace uuvsim {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SingularAttitude: return "SingularAttitude";
        case ErrorKind::SingularTransform: return "SingularTransform";
        case ErrorKind::NonPositiveEffectiveMass: return "NonPositiveEffectiveMass";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorKind::NoPinnedVehicle: return "NoPinnedVehicle";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::MissingDelta: return "MissingDelta";
        case ErrorKind::NonPositiveGain: return "NonPositiveGain";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InvalidScenario: return "InvalidScenario";
        case ErrorKind::EmptyLog: return "EmptyLog";
    }
    return "Unknown";
}

namespace {

constexpr double kOffsetLimit = std::numbers::pi / 2.0 - 1e-6;

void require_effective_masses(const VehicleParams& p) {
    const double m[] = {p.m1(), p.m2(), p.m3(), p.m4(), p.m5()};
    for (int i = 0; i < 5; ++i) {
        if (!(m[i] > 0.0)) {
            throw Error(ErrorKind::NonPositiveEffectiveMass,
                        "VehicleParams invariant violated: m" + std::to_string(i + 1) +
                            " = " + std::to_string(m[i]) + " must be > 0");
        }
    }
}

}  // namespace

void VehicleParams::validate() const {
    const double fields[] = {mass,      inertia_y, inertia_z, added_u,   added_v,
                             added_w,   added_q,   added_r,   damping_u, damping_v,
                             damping_w, damping_q, damping_r, restoring};
    for (double f : fields) {
        if (!std::isfinite(f)) {
            throw Error(ErrorKind::InvalidArgument, "VehicleParams invariant violated: non-finite coefficient");
        }
    }
    if (!(mass > 0.0) || !(inertia_y > 0.0) || !(inertia_z > 0.0)) {
        throw Error(ErrorKind::NonPositiveEffectiveMass,
                    "VehicleParams invariant violated: mass and inertias must be > 0");
    }
    const double damping[] = {damping_u, damping_v, damping_w, damping_q, damping_r};
    for (double c : damping) {
        if (c < 0.0) {
            throw Error(ErrorKind::InvalidArgument,
                        "VehicleParams invariant violated: damping coefficients must be >= 0");
        }
    }
    require_effective_masses(*this);
}

StateVector VehicleState::pack() const {
    StateVector x;
    x << position, attitude, linear_vel, angular_vel;
    return x;
}

VehicleState VehicleState::unpack(const StateVector& x) {
    VehicleState s;
    s.position = x.segment<3>(0);
    s.attitude = x.segment<2>(3);
    s.linear_vel = x.segment<3>(5);
    s.angular_vel = x.segment<2>(8);
    return s;
}

StateVector state_derivative(const VehicleState& state, const VehicleParams& p,
                             const ControlInput& tau, const DisturbanceVector& d,
                             double attitude_margin) {
    require_effective_masses(p);

    const double theta = state.theta();
    const double psi = state.psi();
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(psi), sp = std::sin(psi);
    if (ct <= attitude_margin) {
        throw Error(ErrorKind::SingularAttitude,
                    "cos(theta) = " + std::to_string(ct) + " at or below the attitude margin");
    }

    const double u = state.linear_vel[0], v = state.linear_vel[1], w = state.linear_vel[2];
    const double q = state.angular_vel[0], r = state.angular_vel[1];
    const double m1 = p.m1(), m2 = p.m2(), m3 = p.m3(), m4 = p.m4(), m5 = p.m5();

    StateVector dx;
    dx[0] = ct * cp * u - sp * v + st * cp * w;
    dx[1] = ct * sp * u + cp * v + st * sp * w;
    dx[2] = -st * u + ct * w;
    dx[3] = q;
    dx[4] = r / ct;

    dx[5] = (m2 * v * r - m3 * w * q - p.damping_u * u + tau.surge + d[0]) / m1;
    dx[6] = (-m1 * u * r - p.damping_v * v + d[1]) / m2;
    dx[7] = (m1 * u * q - p.damping_w * w + d[2]) / m3;
    dx[8] = ((m3 - m1) * u * w - p.damping_q * q - p.restoring * st + tau.pitch + d[3]) / m4;
    dx[9] = ((m1 - m2) * u * v - p.damping_r * r + tau.yaw + d[4]) / m5;
    return dx;
}

SphericalSpeed spherical_transform(const Vec3& nu1, const Vec2& eta2, const SphericalSpeed& prev,
                                   double speed_floor) {
    const double u = nu1[0], v = nu1[1], w = nu1[2];
    SphericalSpeed s;
    s.speed = nu1.norm();

    if (s.speed < speed_floor) {
        s.degenerate = true;
        s.theta_prime = prev.theta_prime;
        s.psi_prime = prev.psi_prime;
    } else {
        const double planar = std::hypot(u, v);
        s.theta_prime = std::atan2(-w, planar);
        if (std::abs(s.theta_prime) > kOffsetLimit) {
            s.theta_prime = std::copysign(kOffsetLimit, s.theta_prime);
            s.clamped = true;
        }
        if (u > 0.0) {
            s.psi_prime = std::atan(v / u);
        } else if (planar == 0.0) {
            // purely vertical motion: sideslip is undefined, keep the last one
            s.psi_prime = prev.psi_prime;
            s.clamped = true;
        } else {
            s.psi_prime = std::copysign(kOffsetLimit, v == 0.0 ? 1.0 : v);
            s.clamped = true;
        }
    }
    s.theta_a = eta2[0] + s.theta_prime;
    s.psi_a = eta2[1] + s.psi_prime;
    return s;
}

Vec3 body_velocity_from_spherical(double speed, double theta_prime, double psi_prime) {
    const double ctp = std::cos(theta_prime);
    return speed * Vec3(ctp * std::cos(psi_prime), ctp * std::sin(psi_prime), -std::sin(theta_prime));
}

Vec3 transformed_kinematics(const SphericalSpeed& s) {
    const double cta = std::cos(s.theta_a);
    return s.speed * Vec3(cta * std::cos(s.psi_a), cta * std::sin(s.psi_a), -std::sin(s.theta_a));
}

}  // namespace uuvsim
