// A scenario fully determines one closed-loop run: fleet parameters,
// topology, formation, reference, initial states, disturbances, controller
// variant with all gains, and timing.
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uuvsim/consensus.hpp"
#include "uuvsim/dynamics.hpp"
#include "uuvsim/gain_qp.hpp"
#include "uuvsim/inner_control.hpp"
#include "uuvsim/topology.hpp"

namespace uuvsim {

/// amplitude * sin(omega t + phase), or cos when `cosine` is set.
struct DisturbanceChannel {
    double amplitude = 0.0;
    double omega = 1.0;
    double phase = 0.0;
    bool cosine = false;
};

using DisturbanceChannels = std::array<DisturbanceChannel, 5>;

struct DisturbanceProfile {
    bool enabled = false;
    double norm_cap = 6.0;  // bound on ||d_i(t)|| every profile must respect
    // One entry per vehicle, or a single entry shared by every vehicle.
    std::vector<DisturbanceChannels> channels;

    /// sqrt(sum of squared amplitudes), an upper bound of ||d_i(t)||.
    double amplitude_bound(int vehicle) const;
    /// Throws InvalidScenario when the bound exceeds the cap.
    void validate(int fleet_size) const;
};

DisturbanceVector disturbance_at(const DisturbanceProfile& profile, int vehicle, double t);

/// Virtual (outer) and inner-loop gain vectors of one controller variant.
struct VariantGains {
    Vec3 virtual_gain = Vec3::Constant(0.3);
    Vec3 inner_gain = Vec3::Constant(10.0);
};

struct Scenario {
    std::string name = "scenario";
    std::vector<VehicleParams> params;
    FleetTopology topology;
    FormationSpec formation;
    Vec3 reference_start = Vec3::Zero();
    Vec3 reference_velocity = Vec3::Zero();
    std::vector<VehicleState> initial;
    DisturbanceProfile disturbance;

    Variant variant = Variant::NBOC;
    std::map<Variant, VariantGains> variant_gains;
    ControllerGains controller;  // attitude gains, shunting, smc, filter
    GainQpConfig optimizer;
    GuardConfig guards;

    double dt = 0.001;
    double dt_sample = 0.1;
    double t_final = 60.0;
    double settling_fraction = 0.02;
    double theta_design_bound = 0.7854;  // rad, used by the static stability check

    int size() const { return topology.size(); }
    int ticks_per_sample() const;
    long long total_ticks() const;

    /// Inner gains of the variant; for BSMC the variant's inner gains are
    /// the switching gains.
    ControllerGains gains_for(Variant v) const;
    const VariantGains& variant_gain(Variant v) const;

    /// Checks every scenario invariant. Topology violations are thrown
    /// with their own kinds; everything else as InvalidScenario.
    void validate() const;
};

/// Parses a TOML scenario; throws Error(InvalidScenario) on syntax or
/// schema problems (the scenario is not validated here).
Scenario parse_scenario(std::string_view toml_text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace uuvsim
