#include "uuvsim/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace uuvsim {

std::array<std::complex<double>, 2> coupled_channel_eigenvalues(double k, double g, double a) {
    Eigen::Matrix2d t;
    t << 0.0, -k, g, -a;
    Eigen::EigenSolver<Eigen::Matrix2d> solver(t, false);
    return {solver.eigenvalues()[0], solver.eigenvalues()[1]};
}

bool StabilityReport::all_hurwitz() const {
    return std::all_of(channels.begin(), channels.end(), [](const auto& c) { return c.hurwitz; });
}

StabilityReport check_stability_conditions(const ControllerGains& gains, double max_abs_theta) {
    StabilityReport report;
    for (int j = 0; j < 3; ++j) {
        auto& ch = report.channels[j];
        const double k = gains.inner[j];
        const double a = gains.shunting.decay[j];
        ch.eig_upper = coupled_channel_eigenvalues(k, gains.shunting.upper[j], a);
        ch.eig_lower = coupled_channel_eigenvalues(k, gains.shunting.lower[j], a);
        double max_re = -std::numeric_limits<double>::infinity();
        for (const auto& l : ch.eig_upper) max_re = std::max(max_re, l.real());
        for (const auto& l : ch.eig_lower) max_re = std::max(max_re, l.real());
        ch.decay_rate = -max_re;
        ch.hurwitz = max_re < 0.0;
    }

    report.theta_bound = max_abs_theta;
    const double c2q = report.channels[1].decay_rate;
    const double c2r = report.channels[2].decay_rate;
    const double ct = std::cos(max_abs_theta);
    const double sec2 = ct > 0.0 ? 1.0 / (ct * ct) : std::numeric_limits<double>::infinity();

    report.pitch_ratio = c2q > 0.0 ? 1.0 / (c2q * gains.k_theta) : std::numeric_limits<double>::infinity();
    report.yaw_ratio = c2r > 0.0 ? sec2 / (c2r * gains.k_psi) : std::numeric_limits<double>::infinity();
    report.pitch_ok = report.channels[1].hurwitz && report.pitch_ratio < 1.0;
    report.yaw_ok = report.channels[2].hurwitz && report.yaw_ratio < 1.0;
    return report;
}

}  // namespace uuvsim
