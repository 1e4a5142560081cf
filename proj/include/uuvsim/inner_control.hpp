// Inner loop: virtual angular-rate commands, the backstepping torque law,
// its shunting-neurodynamics variant, a boundary-layer sliding-mode
// variant, and the causal differentiator feeding them.
#pragma once

#include <optional>
#include <string_view>

#include "uuvsim/consensus.hpp"
#include "uuvsim/dynamics.hpp"

namespace uuvsim {

enum class Variant { NBOC, BOC, NBC, BC, BSMC };

std::string_view to_string(Variant v);
/// Case-insensitive; empty optional for unknown names.
std::optional<Variant> parse_variant(std::string_view name);
bool uses_optimizer(Variant v);
bool uses_shunting(Variant v);

struct ShuntingParams {
    Vec3 decay = Vec3::Constant(10.0);        // a_j
    Vec3 upper = Vec3::Constant(30.0);        // b_j
    Vec3 lower = Vec3::Constant(30.0);        // b'_j, activity floor is -b'_j
};

struct SmcParams {
    Vec3 gains = Vec3(20.0, 15.0, 15.0);     // u, q, r channels
    double boundary_layer = 0.05;
};

struct ControllerGains {
    double k_theta = 2.0;
    double k_psi = 2.0;
    Vec3 inner = Vec3::Constant(10.0);       // k_u, k_q, k_r
    ShuntingParams shunting;
    SmcParams smc;
    double filter_tau = 0.02;                 // differentiator time constant, s

    /// Throws NonPositiveGain / InvalidArgument.
    void validate() const;
};

/// First-order washout s / (tau s + 1), Tustin-discretized. High-frequency
/// gain is 1/tau and ramps are tracked without steady-state bias.
class WashoutDifferentiator {
public:
    WashoutDifferentiator() = default;
    /// Requires tau >= 2 dt.
    WashoutDifferentiator(double tau, double dt);

    double update(double sample);
    double value() const { return rate_; }

private:
    double tau_ = 0.02;
    double dt_ = 0.001;
    double prev_ = 0.0;
    double rate_ = 0.0;
    bool primed_ = false;
};

struct AttitudeLoopInputs {
    double theta = 0.0;        // body pitch
    double theta_a = 0.0;
    double psi_a = 0.0;
    double theta_cmd = 0.0;
    double psi_cmd = 0.0;
    double theta_prime_rate = 0.0;
    double psi_prime_rate = 0.0;
    double theta_cmd_rate = 0.0;
    double psi_cmd_rate = 0.0;
};

struct AngularRateCommand {
    double q = 0.0;
    double r = 0.0;
};

/// Pitch/yaw-rate commands that make the transformed attitude errors decay
/// at rates k_theta, k_psi. Throws SingularAttitude.
AngularRateCommand virtual_angular_commands(const AttitudeLoopInputs& in, double k_theta,
                                            double k_psi,
                                            double attitude_margin = GuardConfig{}.attitude_margin);

struct TrackingErrors {
    double speed = 0.0;   // u_a - u_cmd
    double theta = 0.0;   // theta_a - theta_cmd, wrapped
    double psi = 0.0;     // psi_a - psi_cmd, wrapped
    double q = 0.0;       // q - q_cmd
    double r = 0.0;       // r - r_cmd
    double q_cmd = 0.0;
    double r_cmd = 0.0;

    /// sqrt(speed^2 + q^2 + r^2)
    double velocity_norm() const;
};

/// Rates of the commands, supplied by the differentiators.
struct Feedforward {
    double speed_cmd_rate = 0.0;
    double q_cmd_rate = 0.0;
    double r_cmd_rate = 0.0;
};

ControlInput backstepping_law(const VehicleState& state, const VehicleParams& params,
                              const SphericalSpeed& spherical, const TrackingErrors& errors,
                              const Feedforward& ff, const ControllerGains& gains,
                              double attitude_margin = GuardConfig{}.attitude_margin);

/// Neuron activities of the u, q, r channels.
using ShuntingState = Vec3;

/// Advances x' = -(a + |s|) x + g(s) over dt with s held, g(s) = b s for
/// s >= 0 and b' s otherwise. Stays inside [-b', b].
ShuntingState shunting_step(const ShuntingState& x, const Vec3& input,
                            const ShuntingParams& params, double dt);

ControlInput neuro_backstepping_law(const VehicleState& state, const VehicleParams& params,
                                    const SphericalSpeed& spherical, const TrackingErrors& errors,
                                    const ShuntingState& activity, const ControllerGains& gains,
                                    double attitude_margin = GuardConfig{}.attitude_margin);

ControlInput smc_law(const VehicleState& state, const VehicleParams& params,
                     const SphericalSpeed& spherical, const TrackingErrors& errors,
                     const Feedforward& ff, const ControllerGains& gains,
                     double attitude_margin = GuardConfig{}.attitude_margin);

/// Everything the inner loop produced at one tick, for logging.
struct InnerLoopOutput {
    ControlInput tau;
    SphericalSpeed spherical;
    TrackingErrors errors;
    ShuntingState activity = ShuntingState::Zero();
};

/// Stateful inner loop of one vehicle: differentiators, shunting
/// activities and the last spherical offsets. Not shared between vehicles.
class InnerController {
public:
    InnerController(Variant variant, const ControllerGains& gains, double dt,
                    const GuardConfig& guards = {});

    /// Computes tau for the current state and command, then advances the
    /// internal filters and shunting activities by one dt.
    InnerLoopOutput update(const VehicleState& state, const VehicleParams& params,
                           const VirtualCommand& command);

    Variant variant() const { return variant_; }
    const ShuntingState& activity() const { return activity_; }

private:
    Variant variant_;
    ControllerGains gains_;
    double dt_;
    GuardConfig guards_;

    WashoutDifferentiator theta_prime_rate_, psi_prime_rate_;
    WashoutDifferentiator theta_cmd_rate_, psi_cmd_rate_, speed_cmd_rate_;
    WashoutDifferentiator q_cmd_rate_, r_cmd_rate_;
    SphericalSpeed last_spherical_;
    ShuntingState activity_ = ShuntingState::Zero();
};

}  // namespace uuvsim
