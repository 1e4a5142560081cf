// Checkable hypotheses of the closed-loop ISS result for the shunting
// controllers: each (error, activity) pair has system matrix
//
//   T_j = [ 0   -k_j ]
//         [ g_j -a_j ]
//
// evaluated at the nominal point (|s| = 0) for both slopes g_j in {b_j, b'_j}.
// c2_j is the smallest decay rate -max Re(lambda) over both slopes.
#pragma once

#include <array>
#include <complex>

#include "uuvsim/inner_control.hpp"

namespace uuvsim {

struct ChannelStability {
    std::array<std::complex<double>, 2> eig_upper;  // g = b
    std::array<std::complex<double>, 2> eig_lower;  // g = b'
    double decay_rate = 0.0;                        // c2
    bool hurwitz = false;
};

struct StabilityReport {
    std::array<ChannelStability, 3> channels;  // u, q, r
    double theta_bound = 0.0;                  // sup |theta| used for the yaw condition
    double pitch_ratio = 0.0;                  // 1 / (c2_q k_theta)
    double yaw_ratio = 0.0;                    // sec^2(theta_bound) / (c2_r k_psi)
    bool pitch_ok = false;
    bool yaw_ok = false;

    bool all_hurwitz() const;
    bool all_pass() const { return all_hurwitz() && pitch_ok && yaw_ok; }
};

/// Eigenvalues of [[0, -k], [g, -a]].
std::array<std::complex<double>, 2> coupled_channel_eigenvalues(double k, double g, double a);

StabilityReport check_stability_conditions(const ControllerGains& gains, double max_abs_theta);

}  // namespace uuvsim
