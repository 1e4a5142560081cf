#include "uuvsim/inner_control.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "uuvsim/angles.hpp"
#include "uuvsim/rk4.hpp"

namespace uuvsim {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::NBOC: return "NBOC";
        case Variant::BOC: return "BOC";
        case Variant::NBC: return "NBC";
        case Variant::BC: return "BC";
        case Variant::BSMC: return "BSMC";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Variant v : {Variant::NBOC, Variant::BOC, Variant::NBC, Variant::BC, Variant::BSMC}) {
        if (upper == to_string(v)) return v;
    }
    return std::nullopt;
}

bool uses_optimizer(Variant v) { return v == Variant::NBOC || v == Variant::BOC; }
bool uses_shunting(Variant v) { return v == Variant::NBOC || v == Variant::NBC; }

void ControllerGains::validate() const {
    if (!(k_theta > 0.0) || !(k_psi > 0.0) || !(inner.array() > 0.0).all()) {
        throw Error(ErrorKind::NonPositiveGain, "ControllerGains invariant violated: loop gains must be > 0");
    }
    if (!(shunting.decay.array() > 0.0).all() || !(shunting.upper.array() > 0.0).all() ||
        !(shunting.lower.array() > 0.0).all()) {
        throw Error(ErrorKind::NonPositiveGain, "ControllerGains invariant violated: shunting a, b, b' must be > 0");
    }
    if (!(smc.gains.array() > 0.0).all() || !(smc.boundary_layer > 0.0)) {
        throw Error(ErrorKind::NonPositiveGain,
                    "ControllerGains invariant violated: sliding-mode gains and boundary layer must be > 0");
    }
    if (!(filter_tau > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "ControllerGains invariant violated: filter time constant must be > 0");
    }
}

WashoutDifferentiator::WashoutDifferentiator(double tau, double dt) : tau_(tau), dt_(dt) {
    if (!(dt > 0.0) || !(tau >= 2.0 * dt)) {
        throw Error(ErrorKind::InvalidArgument, "differentiator needs dt > 0 and tau >= 2 dt");
    }
}

double WashoutDifferentiator::update(double sample) {
    if (!primed_) {
        primed_ = true;
        prev_ = sample;
        rate_ = 0.0;
        return rate_;
    }
    rate_ = (2.0 * (sample - prev_) - (dt_ - 2.0 * tau_) * rate_) / (dt_ + 2.0 * tau_);
    prev_ = sample;
    return rate_;
}

AngularRateCommand virtual_angular_commands(const AttitudeLoopInputs& in, double k_theta,
                                            double k_psi, double attitude_margin) {
    const double ct = std::cos(in.theta);
    if (ct < attitude_margin) {
        throw Error(ErrorKind::SingularAttitude, "cos(theta) below margin in attitude loop");
    }
    AngularRateCommand out;
    out.q = -k_theta * wrap_angle(in.theta_a - in.theta_cmd) - in.theta_prime_rate + in.theta_cmd_rate;
    out.r = ct * (-k_psi * wrap_angle(in.psi_a - in.psi_cmd) - in.psi_prime_rate + in.psi_cmd_rate);
    return out;
}

double TrackingErrors::velocity_norm() const { return std::sqrt(speed * speed + q * q + r * r); }

namespace {

// Cancellation structure shared by every inner law. `feedback` is what
// each law puts in place of the stabilizing term of the u, q, r channels.
ControlInput lemma_structure(const VehicleState& s, const VehicleParams& p,
                             const SphericalSpeed& sph, const TrackingErrors& err,
                             const Vec3& feedback, const Feedforward& ff, double margin) {
    const double ctp = std::cos(sph.theta_prime), stp = std::sin(sph.theta_prime);
    const double cpp = std::cos(sph.psi_prime), spp = std::sin(sph.psi_prime);
    const double projection = ctp * cpp;
    if (projection < margin) {
        throw Error(ErrorKind::SingularTransform,
                    "cos(theta')cos(psi') = " + std::to_string(projection) + " below margin");
    }
    const double ct = std::cos(s.theta());
    if (ct < margin) {
        throw Error(ErrorKind::SingularAttitude, "cos(theta) below margin in torque law");
    }

    const double u = s.linear_vel[0], v = s.linear_vel[1], w = s.linear_vel[2];
    const double q = s.angular_vel[0], r = s.angular_vel[1];
    const double m1 = p.m1(), m2 = p.m2(), m3 = p.m3(), m4 = p.m4(), m5 = p.m5();

    // cancels the sway/heave contributions to the resultant-speed rate
    const double coupling = ctp * spp / m2 * (m1 * u * r + p.damping_v * v) +
                            stp / m3 * (m1 * u * q - p.damping_w * w);

    ControlInput tau;
    tau.surge = -m2 * v * r + m3 * w * q + p.damping_u * u +
                m1 / projection * (feedback[0] + ff.speed_cmd_rate + coupling);
    tau.pitch = -(m3 - m1) * u * w + p.damping_q * q + p.restoring * std::sin(s.theta()) +
                m4 * feedback[1] - m4 * err.theta + m4 * ff.q_cmd_rate;
    tau.yaw = -(m1 - m2) * u * v + p.damping_r * r + m5 * feedback[2] - m5 * err.psi / ct +
              m5 * ff.r_cmd_rate;
    return tau;
}

double saturate(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

ControlInput backstepping_law(const VehicleState& state, const VehicleParams& params,
                              const SphericalSpeed& spherical, const TrackingErrors& errors,
                              const Feedforward& ff, const ControllerGains& gains,
                              double attitude_margin) {
    const Vec3 fb = -gains.inner.cwiseProduct(Vec3(errors.speed, errors.q, errors.r));
    return lemma_structure(state, params, spherical, errors, fb, ff, attitude_margin);
}

ControlInput neuro_backstepping_law(const VehicleState& state, const VehicleParams& params,
                                    const SphericalSpeed& spherical, const TrackingErrors& errors,
                                    const ShuntingState& activity, const ControllerGains& gains,
                                    double attitude_margin) {
    const Vec3 fb = -gains.inner.cwiseProduct(activity);
    return lemma_structure(state, params, spherical, errors, fb, Feedforward{}, attitude_margin);
}

ControlInput smc_law(const VehicleState& state, const VehicleParams& params,
                     const SphericalSpeed& spherical, const TrackingErrors& errors,
                     const Feedforward& ff, const ControllerGains& gains, double attitude_margin) {
    const double phi = gains.smc.boundary_layer;
    const Vec3 sat(saturate(errors.speed / phi), saturate(errors.q / phi), saturate(errors.r / phi));
    const Vec3 fb = -gains.smc.gains.cwiseProduct(sat);
    return lemma_structure(state, params, spherical, errors, fb, ff, attitude_margin);
}

ShuntingState shunting_step(const ShuntingState& x, const Vec3& input, const ShuntingParams& params,
                            double dt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "shunting step needs dt > 0");
    }
    ShuntingState out;
    for (int j = 0; j < 3; ++j) {
        const double s = input[j];
        const double rate = params.decay[j] + std::abs(s);
        const double drive = s >= 0.0 ? params.upper[j] * s : params.lower[j] * s;
        // RK4 on x' = -rate x + drive keeps x between its start and the
        // equilibrium only while rate * h stays inside the real stability
        // interval (about 2.78); substep to stay well within it.
        const int substeps = std::max(1, static_cast<int>(std::ceil(rate * dt / 2.5)));
        const double h = dt / substeps;
        double xj = x[j];
        for (int k = 0; k < substeps; ++k) {
            xj = rk4_step(xj, 0.0, h, [&](double, double y) { return -rate * y + drive; });
        }
        out[j] = xj;
    }
    return out;
}

InnerController::InnerController(Variant variant, const ControllerGains& gains, double dt,
                                 const GuardConfig& guards)
    : variant_(variant),
      gains_(gains),
      dt_(dt),
      guards_(guards),
      theta_prime_rate_(gains.filter_tau, dt),
      psi_prime_rate_(gains.filter_tau, dt),
      theta_cmd_rate_(gains.filter_tau, dt),
      psi_cmd_rate_(gains.filter_tau, dt),
      speed_cmd_rate_(gains.filter_tau, dt),
      q_cmd_rate_(gains.filter_tau, dt),
      r_cmd_rate_(gains.filter_tau, dt) {
    gains_.validate();
}

InnerLoopOutput InnerController::update(const VehicleState& state, const VehicleParams& params,
                                        const VirtualCommand& command) {
    InnerLoopOutput out;
    out.spherical = spherical_transform(state.linear_vel, state.attitude, last_spherical_,
                                        guards_.speed_floor);
    last_spherical_ = out.spherical;
    const SphericalSpeed& sph = out.spherical;

    AttitudeLoopInputs att;
    att.theta = state.theta();
    att.theta_a = sph.theta_a;
    att.psi_a = sph.psi_a;
    att.theta_cmd = command.theta;
    att.psi_cmd = command.psi;
    att.theta_prime_rate = theta_prime_rate_.update(sph.theta_prime);
    att.psi_prime_rate = psi_prime_rate_.update(sph.psi_prime);
    att.theta_cmd_rate = theta_cmd_rate_.update(command.theta);
    att.psi_cmd_rate = psi_cmd_rate_.update(command.psi);
    const AngularRateCommand rates =
        virtual_angular_commands(att, gains_.k_theta, gains_.k_psi, guards_.attitude_margin);

    Feedforward ff;
    ff.speed_cmd_rate = speed_cmd_rate_.update(command.speed);
    ff.q_cmd_rate = q_cmd_rate_.update(rates.q);
    ff.r_cmd_rate = r_cmd_rate_.update(rates.r);

    TrackingErrors& err = out.errors;
    err.speed = sph.speed - command.speed;
    err.theta = wrap_angle(sph.theta_a - command.theta);
    err.psi = wrap_angle(sph.psi_a - command.psi);
    err.q_cmd = rates.q;
    err.r_cmd = rates.r;
    err.q = state.angular_vel[0] - rates.q;
    err.r = state.angular_vel[1] - rates.r;

    out.activity = activity_;
    switch (variant_) {
        case Variant::NBOC:
        case Variant::NBC:
            out.tau = neuro_backstepping_law(state, params, sph, err, activity_, gains_,
                                             guards_.attitude_margin);
            activity_ = shunting_step(activity_, Vec3(err.speed, err.q, err.r), gains_.shunting, dt_);
            break;
        case Variant::BOC:
        case Variant::BC:
            out.tau = backstepping_law(state, params, sph, err, ff, gains_, guards_.attitude_margin);
            break;
        case Variant::BSMC:
            out.tau = smc_law(state, params, sph, err, ff, gains_, guards_.attitude_margin);
            break;
    }
    return out;
}

}  // namespace uuvsim
