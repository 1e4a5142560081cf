// One-step constrained gain optimization run by each vehicle at every
// sample instant.
//
// The decision variable is the diagonal virtual gain k in R^3. With
//
//   rho(k)  = -diag(k) e0 + v_ref
//   e1(k)   = sum_j a_ij (eta0 + rho dt - eta_j - delta_ij) + b (eta0 + rho dt - p_ref)
//
// the objective is
//
//   J(k) = e1' Q e1 + rho' R1 rho + (rho - rho0)' R2 (rho - rho0) + sum_j p_j (k_j - k0_j)^2
//
// subject to rho_lo <= rho(k) <= rho_hi and k >= k_min. Because rho_j only
// depends on k_j, the feasible set is a box in k. With diagonal weights the
// problem splits into three scalar convex quadratics, each solved in closed
// form; otherwise projected coordinate descent is used.
#pragma once

#include <vector>

#include <Eigen/Core>

#include "uuvsim/consensus.hpp"

namespace uuvsim {

using Mat3 = Eigen::Matrix3d;

struct GainQpWeights {
    Mat3 q = Vec3::Constant(10.0).asDiagonal();
    Mat3 r1 = Mat3::Identity();
    Mat3 r2 = Mat3::Identity();
    Vec3 p = Vec3::Constant(0.1);
};

struct GainQpConfig {
    GainQpWeights weights;
    double dt_sample = 0.1;
    Vec3 rho_lo = Vec3::Constant(-1.5);
    Vec3 rho_hi = Vec3::Constant(1.5);
    double k_min = 1e-3;
};

/// Neighbor data frozen at the sample instant.
struct PredictionTerm {
    double weight = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 delta = Vec3::Zero();
};

struct GainQpProblem {
    Vec3 e0 = Vec3::Zero();
    Vec3 eta0 = Vec3::Zero();
    Vec3 ref_pos = Vec3::Zero();
    Vec3 ref_vel = Vec3::Zero();
    Vec3 rho_prev = Vec3::Zero();
    Vec3 k_prev = Vec3::Ones();
    GainQpWeights weights;
    double dt_sample = 0.1;
    Vec3 rho_lo = Vec3::Constant(-1.5);
    Vec3 rho_hi = Vec3::Constant(1.5);
    double k_min = 1e-3;
    std::vector<PredictionTerm> neighbors;
    double pinning = 0.0;

    /// Throws InvalidArgument when a field breaks its invariant.
    void validate() const;

    Vec3 rho(const Vec3& k) const { return -k.cwiseProduct(e0) + ref_vel; }
    /// One-step-ahead consensus error for virtual velocity `rho`.
    Vec3 predicted_error(const Vec3& rho) const;
    double objective(const Vec3& k) const;
};

enum class QpStatus { Optimal, ClampedFeasible, InfeasibleRepaired };

const char* to_string(QpStatus s);

struct GainQpSolution {
    Vec3 k_star = Vec3::Ones();
    Vec3 rho_star = Vec3::Zero();
    double objective = 0.0;
    QpStatus status = QpStatus::Optimal;
    int sweeps = 0;  // coordinate-descent sweeps; 0 on the closed-form path
};

/// Samples everything at the current instant. The previous virtual
/// command defaults to the one the held gains produce now.
GainQpProblem build_problem(const NeighborSnapshot& view, const Vec3& own_position,
                            const FormationSpec& spec, const GainQpConfig& config,
                            const Vec3& k_prev);

struct SolveOptions {
    double tolerance = 1e-10;
    int max_sweeps = 500;
    bool force_coordinate_descent = false;
};

GainQpSolution solve(const GainQpProblem& problem, const SolveOptions& options = {});

/// Feeds the optimal virtual velocity through command extraction.
VirtualCommand apply_solution(const GainQpSolution& solution, const VirtualCommand& prev,
                              double speed_floor = GuardConfig{}.speed_floor);

}  // namespace uuvsim
