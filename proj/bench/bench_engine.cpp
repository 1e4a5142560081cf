// Serial reference vs OpenMP tick loop on ring fleets of growing size.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "uuvsim/engine.hpp"

using namespace uuvsim;

namespace {

// Bidirectional ring on a circle of radius 10 around the reference, every
// vehicle pinned, starting slightly off its slot.
Scenario ring_fleet(int n, double t_final) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, (i + 1) % n) = 0.8;
        a(i, (i + n - 1) % n) = 1.0;
    }
    Scenario sc;
    sc.name = "ring" + std::to_string(n);
    sc.topology = FleetTopology(a, Eigen::VectorXd::Ones(n));
    sc.reference_velocity = Vec3(0.7, 0.1, 0.0);
    sc.formation = FormationSpec(linear_reference(sc.reference_start, sc.reference_velocity));

    std::vector<Vec3> slot(n);
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / n;
        slot[i] = Vec3(10.0 * std::cos(phi), 10.0 * std::sin(phi), 0.0);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && (a(i, j) > 0.0 || a(j, i) > 0.0) && !sc.formation.has_offset(i, j)) {
                sc.formation.set_offset(i, j, slot[i] - slot[j]);
                sc.formation.set_offset(j, i, slot[j] - slot[i]);
            }
        }
        VehicleState s;
        s.position = slot[i] + Vec3(0.5, -0.5, -1.0);
        s.linear_vel = Vec3(0.1, 0.0, 0.0);
        sc.initial.push_back(s);
    }
    sc.params.assign(n, VehicleParams{});
    sc.variant_gains[Variant::NBOC] = {Vec3::Constant(0.3), Vec3::Constant(10.0)};
    sc.t_final = t_final;
    return sc;
}

void run_fleet(benchmark::State& state, Execution execution) {
    const Scenario sc = ring_fleet(static_cast<int>(state.range(0)), 1.0);
    for (auto _ : state) {
        RunResult r = run(sc, RunOptions{execution});
        benchmark::DoNotOptimize(r.log.records.data());
    }
    state.counters["vehicles"] = static_cast<double>(state.range(0));
}

void BM_Serial(benchmark::State& state) { run_fleet(state, Execution::Serial); }
void BM_Parallel(benchmark::State& state) { run_fleet(state, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_Serial)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
