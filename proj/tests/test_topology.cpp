#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "uuvsim/topology.hpp"

using namespace uuvsim;

namespace {

FleetTopology four_vehicle_chain() {
    Eigen::MatrixXd a(4, 4);
    a << 0.0, 0.8, 0.0, 0.0,
         1.0, 0.0, 0.8, 0.0,
         0.0, 1.0, 0.0, 0.8,
         0.0, 0.0, 1.0, 0.0;
    return FleetTopology(a, Eigen::VectorXd::Ones(4));
}

FleetSnapshot snapshot_of(int n) {
    FleetSnapshot s;
    for (int i = 0; i < n; ++i) s.positions.push_back(Vec3(i, 10.0 * i, -i));
    s.reference.position = Vec3(5, 1, 5);
    s.reference.velocity = Vec3(0.7, 0.1, 0.0);
    return s;
}

}  // namespace

TEST_CASE("four-vehicle chain satisfies Assumption 1 and is positive definite") {
    const FleetTopology t = four_vehicle_chain();
    const TopologyReport r = validate_topology(t);
    CHECK(r.ok());
    CHECK(r.connected);
    CHECK(r.strongly_connected);
    CHECK(r.has_pinned);
    CHECK(r.positive_definite);
    const auto ev = oracle::jacobi_eigenvalues(oracle::sym_l_plus_b(t.adjacency(), t.pinning()));
    CHECK(ev.front() > 0.0);
    CHECK(std::abs(r.min_sym_eigenvalue - ev.front()) < 1e-10);
}

TEST_CASE("no edges, all pinned: L + B is the identity, but the graph is disconnected") {
    const FleetTopology t(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Ones(3));
    CHECK((t.laplacian_plus_pinning() - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    const TopologyReport r = validate_topology(t);
    CHECK(r.positive_definite);
    CHECK(r.min_sym_eigenvalue == doctest::Approx(1.0));
    CHECK(r.violations == std::vector<ErrorKind>{ErrorKind::DisconnectedGraph});
}

TEST_CASE("Assumption 1 violations") {
    SUBCASE("no pinned vehicle") {
        const FleetTopology t(four_vehicle_chain().adjacency(), Eigen::VectorXd::Zero(4));
        const TopologyReport r = validate_topology(t);
        CHECK_FALSE(r.ok());
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0] == ErrorKind::NoPinnedVehicle);
        CHECK(r.messages[0].find("Assumption 1") != std::string::npos);
        try {
            r.throw_if_invalid();
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoPinnedVehicle);
        }
    }
    SUBCASE("disconnected") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
        a(1, 0) = 1.0;
        a(3, 2) = 1.0;
        const TopologyReport r = validate_topology(FleetTopology(a, Eigen::VectorXd::Ones(4)));
        CHECK_FALSE(r.connected);
        REQUIRE_FALSE(r.violations.empty());
        CHECK(r.violations[0] == ErrorKind::DisconnectedGraph);
        CHECK(r.messages[0].find("Assumption 1") != std::string::npos);
    }
    SUBCASE("weakly connected digraph is accepted with a warning flag") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
        a(1, 0) = 1.0;
        a(2, 1) = 1.0;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
        b[0] = 1.0;
        const TopologyReport r = validate_topology(FleetTopology(a, b));
        CHECK(r.ok());
        CHECK_FALSE(r.strongly_connected);
    }
}

TEST_CASE("malformed topologies are rejected at construction") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    CHECK_THROWS_AS(FleetTopology(a, Eigen::VectorXd::Ones(2)), Error);
    a(0, 0) = 0.0;
    a(0, 1) = -1.0;
    CHECK_THROWS_AS(FleetTopology(a, Eigen::VectorXd::Ones(2)), Error);
    CHECK_THROWS_AS(FleetTopology(Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Ones(3)), Error);
}

TEST_CASE("random connected undirected graphs: zero row sums, positive definite, all accepted") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + trial % 8;
        const auto g = oracle::random_connected_graph(n, rng, true);
        const FleetTopology t(g.adjacency, g.pinning);
        CHECK(t.laplacian().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
        const TopologyReport r = validate_topology(t);
        CHECK(r.ok());
        const auto ev = oracle::jacobi_eigenvalues(oracle::sym_l_plus_b(g.adjacency, g.pinning));
        for (double l : ev) CHECK(l > 0.0);
        CHECK(std::abs(r.min_sym_eigenvalue - ev.front()) < 1e-9);
    }
}

TEST_CASE("random connected digraphs: accepted exactly when sym(L+B) is positive definite") {
    std::mt19937_64 rng(4048);
    int rejected = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto g = oracle::random_connected_graph(1 + trial % 8, rng);
        const FleetTopology t(g.adjacency, g.pinning);
        CHECK(t.laplacian().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
        const TopologyReport r = validate_topology(t);
        const double oracle_min = oracle::jacobi_eigenvalues(oracle::sym_l_plus_b(g.adjacency, g.pinning)).front();
        CHECK(std::abs(r.min_sym_eigenvalue - oracle_min) < 1e-9);
        CHECK(r.ok() == (oracle_min > kPositiveDefiniteTol));
        if (!r.ok()) {
            ++rejected;
            CHECK(r.violations == std::vector<ErrorKind>{ErrorKind::NotPositiveDefinite});
        }
    }
    // Assumption 1 alone does not imply a definite sym(L+B) on digraphs
    CHECK(rejected > 0);
}

TEST_CASE("directed counterexample to definiteness under Assumption 1") {
    // leader 0 pinned weakly, heavy one-way links
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(1, 0) = 4.0;
    Eigen::VectorXd b(2);
    b << 0.1, 0.0;
    const TopologyReport r = validate_topology(FleetTopology(a, b));
    CHECK(r.connected);
    CHECK(r.has_pinned);
    CHECK_FALSE(r.positive_definite);
    CHECK_FALSE(r.ok());
}

TEST_CASE("neighbor_view exposes exactly the in-neighbors") {
    const FleetTopology t = four_vehicle_chain();
    const FleetSnapshot snap = snapshot_of(4);

    const NeighborSnapshot v0 = neighbor_view(t, 0, snap);
    REQUIRE(v0.neighbors.size() == 1);
    CHECK(v0.neighbors[0].index == 1);
    CHECK(v0.neighbors[0].weight == doctest::Approx(0.8));
    CHECK(v0.neighbors[0].position == snap.positions[1]);
    CHECK(v0.pinning == 1.0);
    REQUIRE(v0.reference_position.has_value());
    CHECK(*v0.reference_position == snap.reference.position);
    CHECK(v0.reference_velocity == snap.reference.velocity);

    const NeighborSnapshot v1 = neighbor_view(t, 1, snap);
    REQUIRE(v1.neighbors.size() == 2);
    CHECK(v1.neighbors[0].index == 0);
    CHECK(v1.neighbors[0].weight == doctest::Approx(1.0));
    CHECK(v1.neighbors[1].index == 2);
    CHECK(v1.neighbors[1].weight == doctest::Approx(0.8));

    CHECK_THROWS_AS(neighbor_view(t, 4, snap), Error);
    CHECK_THROWS_AS(neighbor_view(t, -1, snap), Error);
}

TEST_CASE("isolated pinned vehicle sees only the reference; unpinned vehicles never do") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(1, 0) = 1.0;
    Eigen::VectorXd b(2);
    b << 1.0, 0.0;
    const FleetTopology t(a, b);
    const FleetSnapshot snap = snapshot_of(2);
    const NeighborSnapshot v0 = neighbor_view(t, 0, snap);
    CHECK(v0.neighbors.empty());
    CHECK(v0.reference_position.has_value());
    const NeighborSnapshot v1 = neighbor_view(t, 1, snap);
    CHECK(v1.neighbors.size() == 1);
    CHECK_FALSE(v1.reference_position.has_value());
}

TEST_CASE("sentinel: non-neighbor states never reach the view") {
    const FleetTopology t = four_vehicle_chain();
    FleetSnapshot snap = snapshot_of(4);
    const NeighborSnapshot before = neighbor_view(t, 0, snap);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    snap.positions[2] = Vec3::Constant(nan);
    snap.positions[3] = Vec3::Constant(nan);
    const NeighborSnapshot after = neighbor_view(t, 0, snap);
    REQUIRE(after.neighbors.size() == before.neighbors.size());
    for (std::size_t k = 0; k < after.neighbors.size(); ++k) {
        CHECK(after.neighbors[k].position.allFinite());
        CHECK(after.neighbors[k].position == before.neighbors[k].position);
    }
}
