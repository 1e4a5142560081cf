#include "uuvsim/topology.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

namespace uuvsim {

FleetTopology::FleetTopology(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning)
    : adjacency_(std::move(adjacency)), pinning_(std::move(pinning)) {
    const auto n = pinning_.size();
    if (n < 1) {
        throw Error(ErrorKind::InvalidArgument, "fleet must contain at least one vehicle");
    }
    if (adjacency_.rows() != n || adjacency_.cols() != n) {
        throw Error(ErrorKind::InvalidArgument, "adjacency must be n x n with n = pinning size");
    }
    if (!adjacency_.allFinite() || !pinning_.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, "topology weights must be finite");
    }
    if ((adjacency_.array() < 0.0).any() || (pinning_.array() < 0.0).any()) {
        throw Error(ErrorKind::InvalidArgument, "topology weights must be non-negative");
    }
    if (adjacency_.diagonal().cwiseAbs().maxCoeff() != 0.0) {
        throw Error(ErrorKind::InvalidArgument, "adjacency diagonal must be zero (a_ii = 0)");
    }
}

Eigen::MatrixXd FleetTopology::laplacian() const {
    Eigen::MatrixXd lap = -adjacency_;
    lap.diagonal() = adjacency_.rowwise().sum();
    return lap;
}

Eigen::MatrixXd FleetTopology::laplacian_plus_pinning() const {
    Eigen::MatrixXd m = laplacian();
    m.diagonal() += pinning_;
    return m;
}

namespace {

// Reachability from vertex 0 using edges where `linked(i, j)` holds.
template <typename Linked>
bool all_reachable(int n, Linked&& linked) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (!seen[j] && linked(i, j)) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    for (char s : seen) {
        if (!s) return false;
    }
    return true;
}

}  // namespace

TopologyReport validate_topology(const FleetTopology& t) {
    const int n = t.size();
    const auto& a = t.adjacency();
    TopologyReport report;

    report.connected = all_reachable(n, [&](int i, int j) { return a(i, j) > 0.0 || a(j, i) > 0.0; });
    // strong connectivity: everything reachable from 0 along and against edges
    report.strongly_connected = all_reachable(n, [&](int i, int j) { return a(j, i) > 0.0; }) &&
                                all_reachable(n, [&](int i, int j) { return a(i, j) > 0.0; });
    report.has_pinned = (t.pinning().array() > 0.0).any();

    const Eigen::MatrixXd lb = t.laplacian_plus_pinning();
    const Eigen::MatrixXd sym = 0.5 * (lb + lb.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    report.min_sym_eigenvalue = eig.eigenvalues().minCoeff();
    report.positive_definite = report.min_sym_eigenvalue > kPositiveDefiniteTol;

    if (!report.connected) {
        report.violations.push_back(ErrorKind::DisconnectedGraph);
        report.messages.emplace_back("Assumption 1 violated: communication graph is not connected");
    }
    if (!report.has_pinned) {
        report.violations.push_back(ErrorKind::NoPinnedVehicle);
        report.messages.emplace_back("Assumption 1 violated: no vehicle receives the reference (all b_i = 0)");
    }
    // Assumption 1 alone does not make sym(L+B) definite on a digraph, and
    // the consensus analysis needs it, so that is checked on its own.
    if (report.connected && report.has_pinned && !report.positive_definite) {
        report.violations.push_back(ErrorKind::NotPositiveDefinite);
        report.messages.emplace_back("sym(L+B) is not positive definite (min eigenvalue " +
                                     std::to_string(report.min_sym_eigenvalue) + ")");
    }
    if (report.connected && !report.strongly_connected) {
        report.messages.emplace_back("warning: digraph is connected but not strongly connected");
    }
    return report;
}

void TopologyReport::throw_if_invalid() const {
    for (std::size_t k = 0; k < violations.size(); ++k) {
        throw Error(violations[k], messages[k]);
    }
}

NeighborSnapshot neighbor_view(const FleetTopology& t, int i, const FleetSnapshot& fleet) {
    const int n = t.size();
    if (i < 0 || i >= n) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "vehicle index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
    }
    if (static_cast<int>(fleet.positions.size()) != n) {
        throw Error(ErrorKind::InvalidArgument, "snapshot size does not match topology");
    }
    NeighborSnapshot view;
    view.self = i;
    view.t = fleet.t;
    for (int j = 0; j < n; ++j) {
        const double w = t.weight(i, j);
        if (w > 0.0) {
            view.neighbors.push_back({j, w, fleet.positions[j]});
        }
    }
    view.pinning = t.pinning()[i];
    if (view.pinning > 0.0) {
        view.reference_position = fleet.reference.position;
    }
    view.reference_velocity = fleet.reference.velocity;
    return view;
}

}  // namespace uuvsim
