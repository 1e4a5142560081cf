// Closed-loop fleet simulation. Each tick the fleet state is frozen into a
// snapshot, every vehicle evaluates its controller from its own neighbor
// view, and then all vehicles are integrated with their torques held.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uuvsim/scenario.hpp"

namespace uuvsim {

/// One vehicle at one sample instant.
struct VehicleRecord {
    VehicleState state;
    Vec3 error = Vec3::Zero();
    double error_norm = 0.0;
    VirtualCommand command;
    Vec3 gains = Vec3::Zero();
    ControlInput tau;
    ShuntingState activity = ShuntingState::Zero();
    double z = 0.0;  // sqrt(u~^2 + q~^2 + r~^2)
    std::string status = "fixed";  // "fixed" for variants without the optimizer
};

struct SimRecord {
    double t = 0.0;
    std::vector<VehicleRecord> vehicles;
};

struct SimLog {
    std::string scenario;
    Variant variant = Variant::NBOC;
    int fleet_size = 0;
    double dt = 0.0;
    double dt_sample = 0.0;
    double t_final = 0.0;
    double settling_fraction = 0.02;
    Vec3 rho_lo = Vec3::Zero();
    Vec3 rho_hi = Vec3::Zero();
    std::vector<SimRecord> records;

    // Tick-level extremes; records only see sample instants.
    std::vector<Vec3> peak_tau;          // max |tau| per channel, whole run
    std::vector<Vec3> startup_peak_tau;  // same, over the first startup_window seconds
    double startup_window = 0.0;
    std::vector<double> max_abs_theta;
};

struct GuardFailure {
    int vehicle = 0;  // 0-based
    double t = 0.0;
    VehicleState state;
    ErrorKind kind = ErrorKind::NonFinite;
    std::string message;
};

struct RunResult {
    SimLog log;  // partial when `failure` is set
    std::optional<GuardFailure> failure;

    bool ok() const { return !failure.has_value(); }
};

/// Controller of one vehicle. step() only ever receives the vehicle's
/// neighbor view and its own state, so it cannot read anything else.
class VehicleAgent {
public:
    VehicleAgent(int index, const Scenario& scenario, Variant variant);

    struct Output {
        VehicleRecord record;
        ControlInput tau;
    };

    /// Computes the torques for this tick. At sample instants the gains are
    /// re-optimized first (NBOC/BOC), otherwise held.
    Output step(const NeighborSnapshot& view, const VehicleState& own, bool sample_instant);

    const Vec3& gains() const { return gains_; }

private:
    int index_;
    Variant variant_;
    const VehicleParams* params_;
    const FormationSpec* formation_;
    GainQpConfig optimizer_;
    double speed_floor_;
    Vec3 gains_;
    std::string status_;
    VirtualCommand last_command_;
    InnerController inner_;
};

enum class Execution { Serial, Parallel };

struct RunOptions {
    Execution execution = Execution::Serial;
    /// Fraction of the horizon counted as start-up for startup_peak_tau.
    double startup_fraction = 0.1;
};

/// Runs the scenario with its own controller variant.
RunResult run(const Scenario& scenario, const RunOptions& options = {});
/// Runs the scenario with `variant` substituted.
RunResult run(const Scenario& scenario, Variant variant, const RunOptions& options = {});

/// One independent run per variant; with Parallel execution the variants
/// are distributed over threads and each run is serial.
std::vector<RunResult> run_variants(const Scenario& scenario, const std::vector<Variant>& variants,
                                    Execution execution = Execution::Serial);

}  // namespace uuvsim
