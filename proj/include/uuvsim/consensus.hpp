// Consensus formation-tracking error, the velocity-level virtual law, and
// extraction of speed/attitude commands from the virtual velocity.
#pragma once

#include <functional>
#include <map>
#include <utility>

#include "uuvsim/dynamics.hpp"
#include "uuvsim/topology.hpp"

namespace uuvsim {

/// Desired relative offsets and the common reference trajectory.
class FormationSpec {
public:
    using Reference = std::function<ReferenceSample(double)>;

    FormationSpec() = default;
    explicit FormationSpec(Reference reference) : reference_(std::move(reference)) {}

    /// Sets delta_ij (desired eta_i - eta_j). Throws InvalidArgument if it
    /// contradicts an existing delta_ji.
    void set_offset(int i, int j, const Vec3& delta);
    /// Throws MissingDelta when no offset is defined for (i, j).
    const Vec3& offset(int i, int j) const;
    bool has_offset(int i, int j) const { return offsets_.contains({i, j}); }
    const std::map<std::pair<int, int>, Vec3>& offsets() const { return offsets_; }

    ReferenceSample reference(double t) const { return reference_ ? reference_(t) : ReferenceSample{}; }

private:
    std::map<std::pair<int, int>, Vec3> offsets_;
    Reference reference_;
};

/// Straight-line reference p0 + v t.
FormationSpec::Reference linear_reference(const Vec3& start, const Vec3& velocity);

/// e_i = sum_j a_ij (eta_i - eta_j - delta_ij) + b_i (eta_i - eta_d).
/// Reads only what `view` exposes.
Vec3 consensus_error(const NeighborSnapshot& view, const Vec3& own_position,
                     const FormationSpec& spec);

/// rho = -diag(gains) e + reference velocity. Throws NonPositiveGain.
Vec3 virtual_law(const Vec3& error, const Vec3& gains, const Vec3& reference_velocity);

struct VirtualCommand {
    Vec3 rho = Vec3::Zero();
    double speed = 0.0;   // u_a^cmd
    double theta = 0.0;   // theta_a^cmd, in (-pi/2, pi/2)
    double psi = 0.0;     // psi_a^cmd, unwrapped against the previous command
    bool held = false;    // rho below the speed floor; angles kept from prev
    bool clamped = false; // theta pinned just inside +-pi/2
};

/// Speed/attitude commands whose forward map reproduces rho.
VirtualCommand extract_commands(const Vec3& rho, const VirtualCommand& prev,
                                double speed_floor = GuardConfig{}.speed_floor);

/// Forward map (u, theta, psi) -> rho.
Vec3 command_velocity(double speed, double theta, double psi);

}  // namespace uuvsim
