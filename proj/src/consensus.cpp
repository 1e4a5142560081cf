#include "uuvsim/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uuvsim/angles.hpp"

namespace uuvsim {

void FormationSpec::set_offset(int i, int j, const Vec3& delta) {
    if (i == j) {
        throw Error(ErrorKind::InvalidArgument, "formation offset needs two distinct vehicles");
    }
    if (!delta.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, "formation offset must be finite");
    }
    if (auto it = offsets_.find({j, i}); it != offsets_.end()) {
        if ((it->second + delta).cwiseAbs().maxCoeff() > 1e-12) {
            throw Error(ErrorKind::InvalidArgument,
                        "FormationSpec invariant violated: delta_" + std::to_string(i + 1) +
                            std::to_string(j + 1) + " != -delta_" + std::to_string(j + 1) +
                            std::to_string(i + 1));
        }
    }
    offsets_[{i, j}] = delta;
}

const Vec3& FormationSpec::offset(int i, int j) const {
    auto it = offsets_.find({i, j});
    if (it == offsets_.end()) {
        throw Error(ErrorKind::MissingDelta, "no formation offset for edge (" + std::to_string(i + 1) +
                                                 ", " + std::to_string(j + 1) + ")");
    }
    return it->second;
}

FormationSpec::Reference linear_reference(const Vec3& start, const Vec3& velocity) {
    return [start, velocity](double t) {
        ReferenceSample s;
        s.position = start + t * velocity;
        s.velocity = velocity;
        return s;
    };
}

Vec3 consensus_error(const NeighborSnapshot& view, const Vec3& own_position,
                     const FormationSpec& spec) {
    Vec3 e = Vec3::Zero();
    for (const auto& nb : view.neighbors) {
        e += nb.weight * (own_position - nb.position - spec.offset(view.self, nb.index));
    }
    if (view.pinning > 0.0) {
        e += view.pinning * (own_position - *view.reference_position);
    }
    return e;
}

Vec3 virtual_law(const Vec3& error, const Vec3& gains, const Vec3& reference_velocity) {
    if (!(gains.array() > 0.0).all()) {
        throw Error(ErrorKind::NonPositiveGain, "virtual gains must be strictly positive");
    }
    return -gains.cwiseProduct(error) + reference_velocity;
}

VirtualCommand extract_commands(const Vec3& rho, const VirtualCommand& prev, double speed_floor) {
    constexpr double kThetaLimit = std::numbers::pi / 2.0 - 1e-6;

    VirtualCommand cmd;
    cmd.rho = rho;
    cmd.speed = rho.norm();
    if (cmd.speed < speed_floor) {
        cmd.speed = 0.0;
        cmd.theta = prev.theta;
        cmd.psi = prev.psi;
        cmd.held = true;
        return cmd;
    }
    cmd.theta = -std::asin(std::clamp(rho[2] / cmd.speed, -1.0, 1.0));
    if (std::abs(cmd.theta) > kThetaLimit) {
        cmd.theta = std::copysign(kThetaLimit, cmd.theta);
        cmd.clamped = true;
    }
    if (rho[0] == 0.0 && rho[1] == 0.0) {
        cmd.psi = prev.psi;
    } else {
        cmd.psi = unwrap_near(std::atan2(rho[1], rho[0]), prev.psi);
    }
    return cmd;
}

Vec3 command_velocity(double speed, double theta, double psi) {
    const double ct = std::cos(theta);
    return speed * Vec3(ct * std::cos(psi), ct * std::sin(psi), -std::sin(theta));
}

}  // namespace uuvsim
