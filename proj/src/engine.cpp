#include "uuvsim/engine.hpp"

#include <cmath>
#include <exception>

namespace uuvsim {

VehicleAgent::VehicleAgent(int index, const Scenario& scenario, Variant variant)
    : index_(index),
      variant_(variant),
      params_(&scenario.params.at(index)),
      formation_(&scenario.formation),
      optimizer_(scenario.optimizer),
      speed_floor_(scenario.guards.speed_floor),
      gains_(scenario.variant_gain(variant).virtual_gain),
      status_(uses_optimizer(variant) ? "optimal" : "fixed"),
      inner_(variant, scenario.gains_for(variant), scenario.dt, scenario.guards) {
    optimizer_.dt_sample = scenario.dt_sample;
}

VehicleAgent::Output VehicleAgent::step(const NeighborSnapshot& view, const VehicleState& own,
                                        bool sample_instant) {
    const Vec3 e = consensus_error(view, own.position, *formation_);
    if (sample_instant && uses_optimizer(variant_)) {
        const GainQpProblem problem = build_problem(view, own.position, *formation_, optimizer_, gains_);
        const GainQpSolution sol = solve(problem);
        gains_ = sol.k_star;
        status_ = to_string(sol.status);
    }
    const Vec3 rho = virtual_law(e, gains_, view.reference_velocity);
    last_command_ = extract_commands(rho, last_command_, speed_floor_);
    const InnerLoopOutput inner = inner_.update(own, *params_, last_command_);

    Output out;
    out.tau = inner.tau;
    VehicleRecord& rec = out.record;
    rec.state = own;
    rec.error = e;
    rec.error_norm = e.norm();
    rec.command = last_command_;
    rec.gains = gains_;
    rec.tau = inner.tau;
    rec.activity = inner.activity;
    rec.z = inner.errors.velocity_norm();
    rec.status = status_;
    return out;
}

namespace {

struct SlotError {
    bool set = false;
    ErrorKind kind = ErrorKind::NonFinite;
    std::string message;
};

// Lowest failing vehicle wins so the reported failure does not depend on
// thread scheduling.
std::optional<GuardFailure> first_failure(const std::vector<SlotError>& errors,
                                          const std::vector<VehicleState>& states, double t) {
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i].set) {
            return GuardFailure{static_cast<int>(i), t, states[i], errors[i].kind, errors[i].message};
        }
    }
    return std::nullopt;
}

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    return run(scenario, scenario.variant, options);
}

RunResult run(const Scenario& scenario, Variant variant, const RunOptions& options) {
    Scenario sc = scenario;
    sc.variant = variant;
    sc.validate();

    const int n = sc.size();
    const bool parallel = options.execution == Execution::Parallel;
    const long long total = sc.total_ticks();
    const int per_sample = sc.ticks_per_sample();
    const long long startup_ticks = std::llround(options.startup_fraction * static_cast<double>(total));

    RunResult result;
    SimLog& log = result.log;
    log.scenario = sc.name;
    log.variant = variant;
    log.fleet_size = n;
    log.dt = sc.dt;
    log.dt_sample = sc.dt_sample;
    log.t_final = sc.t_final;
    log.settling_fraction = sc.settling_fraction;
    log.rho_lo = sc.optimizer.rho_lo;
    log.rho_hi = sc.optimizer.rho_hi;
    log.startup_window = static_cast<double>(startup_ticks) * sc.dt;
    log.peak_tau.assign(n, Vec3::Zero());
    log.startup_peak_tau.assign(n, Vec3::Zero());
    log.max_abs_theta.assign(n, 0.0);
    log.records.reserve(static_cast<std::size_t>(total / per_sample + 1));

    std::vector<VehicleAgent> agents;
    agents.reserve(n);
    for (int i = 0; i < n; ++i) agents.emplace_back(i, sc, variant);

    std::vector<VehicleState> states = sc.initial;
    std::vector<VehicleAgent::Output> outputs(n);
    std::vector<SlotError> errors(n);
    FleetSnapshot snap;
    snap.positions.resize(n);

    for (long long tick = 0; tick <= total; ++tick) {
        const double t = static_cast<double>(tick) * sc.dt;
        const bool sample = tick % per_sample == 0;

        snap.t = t;
        for (int i = 0; i < n; ++i) snap.positions[i] = states[i].position;
        snap.reference = sc.formation.reference(t);

#pragma omp parallel for schedule(static) if (parallel)
        for (int i = 0; i < n; ++i) {
            try {
                const NeighborSnapshot view = neighbor_view(sc.topology, i, snap);
                outputs[i] = agents[i].step(view, states[i], sample);
            } catch (const Error& e) {
                errors[i] = {true, e.kind(), e.what()};
            }
        }
        if (auto failure = first_failure(errors, states, t)) {
            result.failure = std::move(failure);
            return result;
        }

        for (int i = 0; i < n; ++i) {
            const ControlInput& tau = outputs[i].tau;
            const Vec3 mag(std::abs(tau.surge), std::abs(tau.pitch), std::abs(tau.yaw));
            log.peak_tau[i] = log.peak_tau[i].cwiseMax(mag);
            if (tick <= startup_ticks) log.startup_peak_tau[i] = log.startup_peak_tau[i].cwiseMax(mag);
            log.max_abs_theta[i] = std::max(log.max_abs_theta[i], std::abs(states[i].theta()));
        }
        if (sample) {
            SimRecord rec;
            rec.t = t;
            rec.vehicles.reserve(n);
            for (int i = 0; i < n; ++i) rec.vehicles.push_back(outputs[i].record);
            log.records.push_back(std::move(rec));
        }
        if (tick == total) break;

#pragma omp parallel for schedule(static) if (parallel)
        for (int i = 0; i < n; ++i) {
            try {
                states[i] = integrate_step(
                    states[i], sc.params[i], outputs[i].tau,
                    [&](double ts) { return disturbance_at(sc.disturbance, i, ts); }, t, sc.dt,
                    sc.guards.attitude_margin);
            } catch (const Error& e) {
                errors[i] = {true, e.kind(), e.what()};
            }
        }
        if (auto failure = first_failure(errors, states, t + sc.dt)) {
            result.failure = std::move(failure);
            return result;
        }
    }
    return result;
}

std::vector<RunResult> run_variants(const Scenario& scenario, const std::vector<Variant>& variants,
                                    Execution execution) {
    const int count = static_cast<int>(variants.size());
    std::vector<RunResult> results(count);
    std::vector<std::exception_ptr> thrown(count);
    const bool parallel = execution == Execution::Parallel;

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int v = 0; v < count; ++v) {
        try {
            results[v] = run(scenario, variants[v]);
        } catch (...) {
            thrown[v] = std::current_exception();
        }
    }
    for (auto& e : thrown) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace uuvsim
