#include "uuvsim/gain_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uuvsim {

const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Optimal: return "optimal";
        case QpStatus::ClampedFeasible: return "clamped";
        case QpStatus::InfeasibleRepaired: return "repaired";
    }
    return "unknown";
}

namespace {

constexpr double kZeroError = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_diagonal(const Mat3& m) {
    return (m - Mat3(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

struct Interval {
    double lo = 0.0;
    double hi = kInf;
    bool feasible = true;
};

// Gains k_j keeping rho_j = v_j - k_j e_j inside [rho_lo_j, rho_hi_j], k_j >= k_min.
Interval feasible_gains(const GainQpProblem& p, int j) {
    const double e = p.e0[j];
    const double v = p.ref_vel[j];
    Interval iv{p.k_min, kInf, true};
    if (std::abs(e) < kZeroError) {
        iv.feasible = v >= p.rho_lo[j] && v <= p.rho_hi[j];
        return iv;
    }
    double a = (v - p.rho_hi[j]) / e;
    double b = (v - p.rho_lo[j]) / e;
    if (e < 0.0) std::swap(a, b);
    iv.lo = std::max(iv.lo, a);
    iv.hi = b;
    iv.feasible = iv.lo <= iv.hi;
    return iv;
}

// J(k) = k' H k - 2 h' k + const
struct Quadratic {
    Mat3 hess;
    Vec3 lin;
};

Quadratic expand(const GainQpProblem& p) {
    double coupling = p.pinning;
    for (const auto& nb : p.neighbors) coupling += nb.weight;
    const double sdt = coupling * p.dt_sample;

    const Mat3 q = 0.5 * (p.weights.q + p.weights.q.transpose());
    const Mat3 r1 = 0.5 * (p.weights.r1 + p.weights.r1.transpose());
    const Mat3 r2 = 0.5 * (p.weights.r2 + p.weights.r2.transpose());

    // e1 = base + sdt * rho, with base the error at rho = 0
    const Vec3 base = p.predicted_error(Vec3::Zero());
    const Vec3 e_at_vref = base + sdt * p.ref_vel;
    const Mat3 m = sdt * sdt * q + r1 + r2;
    const Vec3 b = sdt * q * e_at_vref + r1 * p.ref_vel + r2 * (p.ref_vel - p.rho_prev);

    const auto e = p.e0.asDiagonal();
    Quadratic out;
    out.hess = e * m * e;
    out.hess.diagonal() += p.weights.p;
    out.lin = e * b + p.weights.p.cwiseProduct(p.k_prev);
    return out;
}

}  // namespace

void GainQpProblem::validate() const {
    auto nonneg_diag = [](const Mat3& m) { return (m.diagonal().array() >= 0.0).all() && m.allFinite(); };
    if (!nonneg_diag(weights.q) || !nonneg_diag(weights.r1) || !nonneg_diag(weights.r2)) {
        throw Error(ErrorKind::InvalidArgument, "GainQpProblem invariant violated: weights must be non-negative");
    }
    if (!(weights.p.array() >= 0.0).all()) {
        throw Error(ErrorKind::InvalidArgument, "GainQpProblem invariant violated: p must be >= 0");
    }
    if (!(rho_lo.array() < rho_hi.array()).all()) {
        throw Error(ErrorKind::InvalidArgument, "GainQpProblem invariant violated: rho_lo < rho_hi required");
    }
    if (!(k_min > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "GainQpProblem invariant violated: k_min must be > 0");
    }
    if (!(dt_sample > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "GainQpProblem invariant violated: dt_sample must be > 0");
    }
    if (!e0.allFinite() || !ref_vel.allFinite() || !rho_prev.allFinite() || !k_prev.allFinite()) {
        throw Error(ErrorKind::NonFinite, "GainQpProblem has non-finite inputs");
    }
}

Vec3 GainQpProblem::predicted_error(const Vec3& rho) const {
    const Vec3 eta1 = eta0 + rho * dt_sample;
    Vec3 e = Vec3::Zero();
    for (const auto& nb : neighbors) {
        e += nb.weight * (eta1 - nb.position - nb.delta);
    }
    e += pinning * (eta1 - ref_pos);
    return e;
}

double GainQpProblem::objective(const Vec3& k) const {
    const Vec3 r = rho(k);
    const Vec3 e1 = predicted_error(r);
    const Vec3 dr = r - rho_prev;
    const Vec3 dk = k - k_prev;
    return e1.dot(weights.q * e1) + r.dot(weights.r1 * r) + dr.dot(weights.r2 * dr) +
           dk.dot(weights.p.cwiseProduct(dk));
}

GainQpProblem build_problem(const NeighborSnapshot& view, const Vec3& own_position,
                            const FormationSpec& spec, const GainQpConfig& config,
                            const Vec3& k_prev) {
    GainQpProblem p;
    p.e0 = consensus_error(view, own_position, spec);
    p.eta0 = own_position;
    p.ref_vel = view.reference_velocity;
    p.pinning = view.pinning;
    if (view.reference_position) p.ref_pos = *view.reference_position;
    for (const auto& nb : view.neighbors) {
        p.neighbors.push_back({nb.weight, nb.position, spec.offset(view.self, nb.index)});
    }
    p.k_prev = k_prev;
    p.rho_prev = p.rho(k_prev);
    p.weights = config.weights;
    p.dt_sample = config.dt_sample;
    p.rho_lo = config.rho_lo;
    p.rho_hi = config.rho_hi;
    p.k_min = config.k_min;
    return p;
}

GainQpSolution solve(const GainQpProblem& p, const SolveOptions& options) {
    p.validate();

    Interval box[3];
    bool repaired = false;
    for (int j = 0; j < 3; ++j) {
        box[j] = feasible_gains(p, j);
        repaired |= !box[j].feasible;
    }

    const Quadratic quad = expand(p);
    const bool separable = !options.force_coordinate_descent && is_diagonal(quad.hess);

    GainQpSolution sol;
    Vec3 k;
    for (int j = 0; j < 3; ++j) {
        k[j] = std::max(p.k_prev[j], p.k_min);
        if (!box[j].feasible) {
            // with e0_j != 0 the box can only demand k_j < k_min
            if (std::abs(p.e0[j]) >= kZeroError) k[j] = p.k_min;
            continue;
        }
        k[j] = std::clamp(k[j], box[j].lo, box[j].hi);
    }

    // unconstrained 1-D minimizer of axis j given the other axes
    auto axis_minimizer = [&](const Vec3& kk, int j) {
        const double hjj = quad.hess(j, j);
        if (!(hjj > 0.0)) return kk[j];
        const double grad = quad.hess.row(j).dot(kk) - quad.lin[j];
        return kk[j] - grad / hjj;
    };

    if (separable) {
        for (int j = 0; j < 3; ++j) {
            if (!box[j].feasible) continue;
            k[j] = std::clamp(axis_minimizer(k, j), box[j].lo, box[j].hi);
        }
    } else {
        for (sol.sweeps = 1; sol.sweeps <= options.max_sweeps; ++sol.sweeps) {
            double step = 0.0;
            for (int j = 0; j < 3; ++j) {
                if (!box[j].feasible) continue;
                const double next = std::clamp(axis_minimizer(k, j), box[j].lo, box[j].hi);
                step = std::max(step, std::abs(next - k[j]));
                k[j] = next;
            }
            if (step < options.tolerance) break;
        }
        sol.sweeps = std::min(sol.sweeps, options.max_sweeps);
    }

    bool clamped = false;
    for (int j = 0; j < 3; ++j) {
        if (!box[j].feasible) continue;
        const double free = axis_minimizer(k, j);
        clamped |= free < box[j].lo - options.tolerance || free > box[j].hi + options.tolerance;
    }

    sol.k_star = k;
    sol.rho_star = p.rho(k);
    for (int j = 0; j < 3; ++j) {
        // exact box membership even when e0_j is numerically zero
        sol.rho_star[j] = std::clamp(sol.rho_star[j], p.rho_lo[j], p.rho_hi[j]);
    }
    sol.objective = p.objective(k);
    sol.status = repaired ? QpStatus::InfeasibleRepaired
                          : (clamped ? QpStatus::ClampedFeasible : QpStatus::Optimal);
    return sol;
}

VirtualCommand apply_solution(const GainQpSolution& solution, const VirtualCommand& prev,
                              double speed_floor) {
    return extract_commands(solution.rho_star, prev, speed_floor);
}

}  // namespace uuvsim
