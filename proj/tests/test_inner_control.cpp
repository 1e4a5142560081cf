#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "uuvsim/inner_control.hpp"
#include "uuvsim/stability.hpp"

using namespace uuvsim;

namespace {

const VehicleParams kParams{};

ControllerGains shipped_gains() { return ControllerGains{}; }  // k_theta = k_psi = 2, K2 = 10, a = 10, b = b' = 30

}  // namespace

TEST_CASE("washout differentiator") {
    const double tau = 0.02, dt = 0.001;
    CHECK_THROWS_AS(WashoutDifferentiator(0.001, dt), Error);

    SUBCASE("constant input") {
        WashoutDifferentiator d(tau, dt);
        double est = 1.0;
        for (int k = 0; k <= 200; ++k) est = d.update(3.0);
        CHECK(std::abs(est) < 1e-6);
    }
    SUBCASE("ramp of slope 2") {
        WashoutDifferentiator d(tau, dt);
        double est = 0.0;
        for (int k = 0; k <= 200; ++k) est = d.update(2.0 * k * dt);
        CHECK(est == doctest::Approx(2.0).epsilon(0.01));
    }
    SUBCASE("slow sine") {
        WashoutDifferentiator d(tau, dt);
        const double w = 1.0;  // 1/tau = 50 rad/s
        double worst = 0.0;
        for (int k = 0; k <= 20000; ++k) {
            const double t = k * dt;
            const double est = d.update(std::sin(w * t));
            if (t > 10 * tau) worst = std::max(worst, std::abs(est - w * std::cos(w * t)));
        }
        CHECK(worst < 0.05 * w);
    }
}

TEST_CASE("virtual angular-rate commands") {
    AttitudeLoopInputs in;
    CHECK(virtual_angular_commands(in, 2.0, 2.0).q == 0.0);
    in.theta_a = 0.1;
    CHECK(virtual_angular_commands(in, 2.0, 2.0).q == doctest::Approx(-0.2));
    in = AttitudeLoopInputs{};
    in.psi_a = 0.1;
    CHECK(virtual_angular_commands(in, 2.0, 2.0).r == doctest::Approx(-0.2));
    // pitch scales the yaw channel, and angle differences are wrapped
    in.theta = std::numbers::pi / 3;
    in.psi_a = 0.1 + 2.0 * std::numbers::pi;
    CHECK(virtual_angular_commands(in, 2.0, 2.0).r == doctest::Approx(-0.1));
    in.theta = std::numbers::pi / 2 - 1e-4;
    CHECK_THROWS_AS(virtual_angular_commands(in, 2.0, 2.0), Error);
}

TEST_CASE("backstepping law") {
    const ControllerGains g = shipped_gains();
    SUBCASE("equilibrium") {
        const ControlInput t = backstepping_law(VehicleState{}, kParams, SphericalSpeed{}, TrackingErrors{},
                                                Feedforward{}, g);
        CHECK(t.surge == 0.0);
        CHECK(t.pitch == 0.0);
        CHECK(t.yaw == 0.0);
    }
    SUBCASE("surge with speed error") {
        VehicleState s;
        s.linear_vel = Vec3(1, 0, 0);
        TrackingErrors e;
        e.speed = 0.5;
        const ControlInput t =
            backstepping_law(s, kParams, spherical_transform(s.linear_vel, s.attitude), e, Feedforward{}, g);
        CHECK(t.surge == doctest::Approx(-19.0));  // beta_u u + m1 (-k_u u~) = 1 - 20
    }
    SUBCASE("singular transform") {
        SphericalSpeed sph;
        sph.speed = 1.0;
        sph.theta_prime = std::numbers::pi / 2 - 1e-4;
        try {
            backstepping_law(VehicleState{}, kParams, sph, TrackingErrors{}, Feedforward{}, g);
            FAIL("expected SingularTransform");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SingularTransform);
        }
    }
    SUBCASE("restoring term is cancelled in pitch") {
        VehicleState s;
        s.attitude[0] = 0.3;
        const ControlInput t = backstepping_law(s, kParams, SphericalSpeed{}, TrackingErrors{}, Feedforward{}, g);
        CHECK(t.pitch == doctest::Approx(kParams.restoring * std::sin(0.3)));
    }
}

TEST_CASE("neuro-backstepping law") {
    const ControllerGains g = shipped_gains();
    CHECK(neuro_backstepping_law(VehicleState{}, kParams, SphericalSpeed{}, TrackingErrors{}, Vec3::Zero(), g)
              .surge == 0.0);
    const ControlInput t =
        neuro_backstepping_law(VehicleState{}, kParams, SphericalSpeed{}, TrackingErrors{}, Vec3(10, 0, 0), g);
    CHECK(t.surge == doctest::Approx(-400.0));  // m1 (-k_u x1) = 4 * -100
    CHECK(t.pitch == 0.0);
    CHECK(t.yaw == 0.0);

    // shunting contributions are bounded a priori by m k b, whatever the error
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> huge(-1e6, 1e6), act(-30.0, 30.0);
    for (int k = 0; k < 1000; ++k) {
        TrackingErrors e;
        e.speed = huge(rng);
        const Vec3 x(act(rng), act(rng), act(rng));
        const ControlInput with = neuro_backstepping_law(VehicleState{}, kParams, SphericalSpeed{}, e, x, g);
        const ControlInput without =
            neuro_backstepping_law(VehicleState{}, kParams, SphericalSpeed{}, e, Vec3::Zero(), g);
        CHECK(std::abs(with.surge - without.surge) <= kParams.m1() * g.inner[0] * g.shunting.upper[0] + 1e-9);
        CHECK(std::abs(with.pitch - without.pitch) <= kParams.m4() * g.inner[1] * g.shunting.upper[1] + 1e-9);
        CHECK(std::abs(with.yaw - without.yaw) <= kParams.m5() * g.inner[2] * g.shunting.upper[2] + 1e-9);
    }
}

TEST_CASE("sliding-mode law") {
    const ControllerGains g = shipped_gains();  // switching gains 20, 15, 15, layer 0.05
    TrackingErrors e;
    SUBCASE("inside the boundary layer it is proportional") {
        e.speed = 0.01;
        const ControlInput t = smc_law(VehicleState{}, kParams, SphericalSpeed{}, e, Feedforward{}, g);
        CHECK(t.surge == doctest::Approx(kParams.m1() * -20.0 * 0.2));
        CHECK(std::abs(t.surge) < kParams.m1() * 20.0);
    }
    SUBCASE("far outside it saturates exactly") {
        e.speed = 5.0;
        e.q = -3.0;
        const ControlInput t = smc_law(VehicleState{}, kParams, SphericalSpeed{}, e, Feedforward{}, g);
        CHECK(t.surge == doctest::Approx(kParams.m1() * -20.0));
        CHECK(t.pitch == doctest::Approx(kParams.m4() * 15.0));
    }
    SUBCASE("zero errors leave the feedforward only") {
        Feedforward ff;
        ff.speed_cmd_rate = 0.3;
        ff.q_cmd_rate = -0.2;
        ff.r_cmd_rate = 0.1;
        const ControlInput t = smc_law(VehicleState{}, kParams, SphericalSpeed{}, e, ff, g);
        CHECK(t.surge == doctest::Approx(kParams.m1() * 0.3));
        CHECK(t.pitch == doctest::Approx(kParams.m4() * -0.2));
        CHECK(t.yaw == doctest::Approx(kParams.m5() * 0.1));
    }
}

TEST_CASE("shunting dynamics") {
    ShuntingParams p;
    CHECK(shunting_step(Vec3::Zero(), Vec3::Zero(), p, 0.001) == Vec3::Zero());

    Vec3 x = Vec3::Zero();
    for (int k = 0; k < 5000; ++k) x = shunting_step(x, Vec3(5, 5, 5), p, 0.001);
    CHECK(std::abs(x[0] - 10.0) < 1e-6);  // b s / (a + s) = 150 / 15

    x = Vec3::Zero();
    for (int k = 0; k < 5000; ++k) x = shunting_step(x, Vec3(-2, -2, -2), p, 0.001);
    CHECK(std::abs(x[1] + 30.0 * 2.0 / 12.0) < 1e-6);
}

TEST_CASE("shunting activities stay inside [-b', b] for random streams") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    long violations = 0;
    for (int stream = 0; stream < 20000; ++stream) {
        ShuntingParams p;
        p.decay = Vec3::Constant(0.1 + 50.0 * unit(rng));
        p.upper = Vec3::Constant(0.5 + 60.0 * unit(rng));
        p.lower = Vec3::Constant(0.5 + 60.0 * unit(rng));
        const double scale = std::pow(10.0, -2.0 + 6.0 * unit(rng));
        const double dt = std::pow(10.0, -4.0 + 2.5 * unit(rng));
        Vec3 x;
        for (int j = 0; j < 3; ++j) x[j] = -p.lower[j] + (p.upper[j] + p.lower[j]) * unit(rng);
        for (int k = 0; k < 20; ++k) {
            const Vec3 s = scale * Vec3(2 * unit(rng) - 1, 2 * unit(rng) - 1, 2 * unit(rng) - 1);
            x = shunting_step(x, s, p, dt);
            violations += ((x.array() > p.upper.array()) || (x.array() < -p.lower.array())).count();
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("inner controller regulates a vehicle already on its command") {
    VehicleState s;
    s.linear_vel = Vec3(1, 0, 0);
    VirtualCommand cmd = extract_commands(Vec3(1, 0, 0), VirtualCommand{});
    for (Variant v : {Variant::BC, Variant::NBC, Variant::BSMC}) {
        InnerController c(v, shipped_gains(), 0.001);
        const InnerLoopOutput out = c.update(s, kParams, cmd);
        CHECK(out.errors.velocity_norm() == doctest::Approx(0.0));
        CHECK(out.tau.surge == doctest::Approx(kParams.damping_u));  // only drag to overcome
        CHECK(out.tau.pitch == doctest::Approx(0.0));
        CHECK(out.tau.yaw == doctest::Approx(0.0));
    }
}

TEST_CASE("variant names") {
    CHECK(parse_variant("nboc") == Variant::NBOC);
    CHECK(parse_variant("BSMC") == Variant::BSMC);
    CHECK_FALSE(parse_variant("PID").has_value());
    CHECK(uses_optimizer(Variant::BOC));
    CHECK_FALSE(uses_optimizer(Variant::NBC));
    CHECK(uses_shunting(Variant::NBOC));
    CHECK_FALSE(uses_shunting(Variant::BSMC));
}

TEST_CASE("stability conditions") {
    const auto ev = coupled_channel_eigenvalues(10.0, 30.0, 10.0);
    for (const auto& l : ev) {
        CHECK(l.real() == doctest::Approx(-5.0));
        CHECK(std::abs(l.imag()) == doctest::Approx(std::sqrt(1100.0) / 2.0));
    }

    const StabilityReport ok = check_stability_conditions(shipped_gains(), std::numbers::pi / 4);
    for (const auto& ch : ok.channels) {
        CHECK(ch.hurwitz);
        CHECK(ch.decay_rate == doctest::Approx(5.0));
    }
    CHECK(ok.pitch_ratio == doctest::Approx(0.1));
    CHECK(ok.yaw_ratio == doctest::Approx(0.2));
    CHECK(ok.all_pass());

    ControllerGains degenerate = shipped_gains();
    degenerate.shunting.upper = Vec3::Zero();  // g = 0
    const auto zero = coupled_channel_eigenvalues(10.0, 0.0, 10.0);
    CHECK(std::max(zero[0].real(), zero[1].real()) == doctest::Approx(0.0));
    const StabilityReport bad = check_stability_conditions(degenerate, std::numbers::pi / 4);
    CHECK_FALSE(bad.all_hurwitz());
    CHECK_FALSE(bad.all_pass());

    ControllerGains slow = shipped_gains();
    slow.k_theta = 0.1;  // 1 / (5 * 0.1) = 2
    CHECK_FALSE(check_stability_conditions(slow, 0.5).pitch_ok);
}
