// Communication graph of the fleet: weighted adjacency, pinning gains to
// the reference, Laplacian algebra, and the distributed-information view
// each vehicle is allowed to see.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uuvsim/dynamics.hpp"
#include "uuvsim/error.hpp"

namespace uuvsim {

/// Immutable weighted digraph plus pinning gains. Row i of the adjacency
/// holds the weights a_ij of the vehicles j that i listens to.
class FleetTopology {
public:
    /// Single pinned vehicle.
    FleetTopology() : FleetTopology(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1)) {}
    /// Throws InvalidArgument on shape mismatch, negative weights, or a_ii != 0.
    FleetTopology(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning);

    int size() const { return static_cast<int>(pinning_.size()); }
    const Eigen::MatrixXd& adjacency() const { return adjacency_; }
    const Eigen::VectorXd& pinning() const { return pinning_; }
    double weight(int i, int j) const { return adjacency_(i, j); }

    /// Row-sum degree matrix minus adjacency.
    Eigen::MatrixXd laplacian() const;
    Eigen::MatrixXd laplacian_plus_pinning() const;

private:
    Eigen::MatrixXd adjacency_;
    Eigen::VectorXd pinning_;
};

struct TopologyReport {
    bool connected = false;           // on the undirected support
    bool strongly_connected = false;  // digraph; warning only
    bool has_pinned = false;
    double min_sym_eigenvalue = 0.0;  // of (L + B + (L + B)^T) / 2
    bool positive_definite = false;
    std::vector<ErrorKind> violations;
    std::vector<std::string> messages;

    bool ok() const { return violations.empty(); }
    /// Throws the first violation as an Error.
    void throw_if_invalid() const;
};

inline constexpr double kPositiveDefiniteTol = 1e-10;

TopologyReport validate_topology(const FleetTopology& topology);

/// Reference signals sampled at one instant.
struct ReferenceSample {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
};

/// Fleet positions at one tick plus the reference sample. Only
/// neighbor_view() should read from it on behalf of a vehicle.
struct FleetSnapshot {
    double t = 0.0;
    std::vector<Vec3> positions;
    ReferenceSample reference;
};

struct NeighborInfo {
    int index = 0;
    double weight = 0.0;
    Vec3 position = Vec3::Zero();
};

/// What vehicle `self` may use: its in-neighbors' positions and weights,
/// its pinning gain, the reference position when pinned, and the common
/// fleet velocity reference.
struct NeighborSnapshot {
    int self = 0;
    double t = 0.0;
    std::vector<NeighborInfo> neighbors;
    double pinning = 0.0;
    std::optional<Vec3> reference_position;
    Vec3 reference_velocity = Vec3::Zero();
};

/// Throws IndexOutOfRange for i outside [0, n).
NeighborSnapshot neighbor_view(const FleetTopology& topology, int i, const FleetSnapshot& fleet);

}  // namespace uuvsim
