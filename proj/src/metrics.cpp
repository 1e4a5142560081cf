#include "uuvsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace uuvsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

std::string g9(double x) { return fmt("%.9g", x); }

bool finite_record(const VehicleRecord& r) {
    return r.state.pack().allFinite() && r.error.allFinite() && r.command.rho.allFinite() &&
           r.gains.allFinite() && std::isfinite(r.tau.surge) && std::isfinite(r.tau.pitch) &&
           std::isfinite(r.tau.yaw) && r.activity.allFinite() && std::isfinite(r.z);
}

}  // namespace

double MetricsReport::mean_settling_time() const {
    if (vehicles.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& v : vehicles) {
        if (!v.settling_time) return kInf;
        sum += *v.settling_time;
    }
    return sum / static_cast<double>(vehicles.size());
}

double MetricsReport::mean_ss_z() const {
    if (vehicles.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& v : vehicles) sum += v.ss_mean_z;
    return sum / static_cast<double>(vehicles.size());
}

double MetricsReport::mean_ss_error() const {
    if (vehicles.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& v : vehicles) sum += v.ss_mean_error;
    return sum / static_cast<double>(vehicles.size());
}

MetricsReport metrics(const SimLog& log) {
    if (log.records.empty()) {
        throw Error(ErrorKind::EmptyLog, "metrics need at least one log record");
    }
    MetricsReport report;
    report.scenario = log.scenario;
    report.variant = log.variant;
    report.t_final = log.t_final;
    report.startup_window = log.startup_window;

    const auto& recs = log.records;
    const double horizon = recs.back().t;
    const double ss_start = 0.75 * horizon;
    const double late_start = 0.5 * horizon;

    for (int i = 0; i < log.fleet_size; ++i) {
        VehicleMetrics m;
        m.initial_error = recs.front().vehicles[i].error_norm;
        m.final_error = recs.back().vehicles[i].error_norm;

        const double threshold = log.settling_fraction * m.initial_error;
        std::optional<double> settled;
        for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
            if (it->vehicles[i].error_norm > threshold) break;
            settled = it->t;
        }
        m.settling_time = settled;

        int ss_count = 0;
        m.gain_min = Vec3::Constant(kInf);
        m.gain_max = Vec3::Constant(-kInf);
        for (const auto& rec : recs) {
            const VehicleRecord& v = rec.vehicles[i];
            report.finite = report.finite && finite_record(v);
            if (rec.t >= ss_start) {
                m.ss_mean_error += v.error_norm;
                m.ss_max_error = std::max(m.ss_max_error, v.error_norm);
                m.ss_mean_z += v.z;
                m.ss_max_z = std::max(m.ss_max_z, v.z);
                ++ss_count;
            }
            if (rec.t >= late_start) m.late_sup_error = std::max(m.late_sup_error, v.error_norm);
            if (v.status == "repaired") {
                ++m.repaired_samples;
            } else {
                const Vec3& rho = v.command.rho;
                const bool inside = (rho.array() >= log.rho_lo.array() - kBoxTolerance).all() &&
                                    (rho.array() <= log.rho_hi.array() + kBoxTolerance).all();
                if (!inside) ++m.box_violations;
            }
            m.gain_min = m.gain_min.cwiseMin(v.gains);
            m.gain_max = m.gain_max.cwiseMax(v.gains);
        }
        if (ss_count > 0) {
            m.ss_mean_error /= ss_count;
            m.ss_mean_z /= ss_count;
        }
        m.gain_final = recs.back().vehicles[i].gains;
        if (i < static_cast<int>(log.peak_tau.size())) {
            m.peak_tau = log.peak_tau[i];
            m.startup_peak_tau = log.startup_peak_tau[i];
            m.max_abs_theta = log.max_abs_theta[i];
        }
        report.vehicles.push_back(m);
    }
    return report;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> csv_columns(int fleet_size, bool controller_column) {
    static const char* const fields[] = {
        "x",     "y",         "z",       "theta", "psi",   "u",     "v",     "w",
        "q",     "r",         "e_x",     "e_y",   "e_z",   "e_norm", "u_cmd", "theta_cmd",
        "psi_cmd", "rho_x",   "rho_y",   "rho_z", "k_1",   "k_2",   "k_3",   "tau_1",
        "tau_2", "tau_3",     "sh_1",    "sh_2",  "sh_3",  "z_vel", "status"};
    std::vector<std::string> cols;
    if (controller_column) cols.emplace_back("controller");
    cols.emplace_back("t");
    for (int i = 1; i <= fleet_size; ++i) {
        for (const char* f : fields) cols.push_back("v" + std::to_string(i) + "_" + f);
    }
    return cols;
}

void write_csv_header(std::ostream& out, int fleet_size, bool controller_column) {
    const auto cols = csv_columns(fleet_size, controller_column);
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
}

void write_csv_rows(std::ostream& out, const SimLog& log, bool controller_column) {
    std::string line;
    for (const auto& rec : log.records) {
        line.clear();
        if (controller_column) {
            line += to_string(log.variant);
            line += ',';
        }
        line += g9(rec.t);
        for (const auto& v : rec.vehicles) {
            const auto put = [&line](double x) {
                line += ',';
                line += g9(x);
            };
            for (int k = 0; k < 3; ++k) put(v.state.position[k]);
            for (int k = 0; k < 2; ++k) put(v.state.attitude[k]);
            for (int k = 0; k < 3; ++k) put(v.state.linear_vel[k]);
            for (int k = 0; k < 2; ++k) put(v.state.angular_vel[k]);
            for (int k = 0; k < 3; ++k) put(v.error[k]);
            put(v.error_norm);
            put(v.command.speed);
            put(v.command.theta);
            put(v.command.psi);
            for (int k = 0; k < 3; ++k) put(v.command.rho[k]);
            for (int k = 0; k < 3; ++k) put(v.gains[k]);
            put(v.tau.surge);
            put(v.tau.pitch);
            put(v.tau.yaw);
            for (int k = 0; k < 3; ++k) put(v.activity[k]);
            put(v.z);
            line += ',';
            line += v.status;
        }
        line += '\n';
        out << line;
    }
}

void write_csv(std::ostream& out, const SimLog& log) {
    write_csv_header(out, log.fleet_size);
    write_csv_rows(out, log);
}

// ---------------------------------------------------------------------------
// text reports

std::string format_stability(const StabilityReport& s) {
    static const char* const names[] = {"u", "q", "r"};
    std::ostringstream out;
    out << "stability (shunting error/activity pairs):\n";
    for (int j = 0; j < 3; ++j) {
        const auto& ch = s.channels[j];
        out << "  T_" << names[j] << ": c2 = " << g9(ch.decay_rate)
            << (ch.hurwitz ? "  Hurwitz" : "  NOT Hurwitz") << '\n';
    }
    out << "  theta bound " << g9(s.theta_bound) << " rad\n";
    out << "  pitch condition 1/(c2_q k_theta) = " << g9(s.pitch_ratio) << (s.pitch_ok ? " < 1  pass" : "  FAIL")
        << '\n';
    out << "  yaw condition sec^2(theta)/(c2_r k_psi) = " << g9(s.yaw_ratio)
        << (s.yaw_ok ? " < 1  pass" : "  FAIL") << '\n';
    out << "  overall: " << (s.all_pass() ? "pass" : "FAIL") << '\n';
    return out.str();
}

std::string format_summary(const MetricsReport& r, const std::optional<StabilityReport>& stability) {
    std::ostringstream out;
    out << "scenario " << r.scenario << "  controller " << to_string(r.variant) << "  t_final "
        << g9(r.t_final) << " s\n";
    out << "vehicle  e(0)        e(T)        settle[s]   ss_mean_e   ss_mean_z   ss_max_z    "
           "|tau1|_0    |tau1|      |tau2|      |tau3|      box_viol  repaired\n";
    for (std::size_t i = 0; i < r.vehicles.size(); ++i) {
        const auto& v = r.vehicles[i];
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "%-8zu %-11.5g %-11.5g %-11s %-11.5g %-11.5g %-11.5g %-11.5g %-11.5g %-11.5g "
                      "%-11.5g %-9d %d\n",
                      i + 1, v.initial_error, v.final_error,
                      v.settling_time ? fmt("%.4g", *v.settling_time).c_str() : "never",
                      v.ss_mean_error, v.ss_mean_z, v.ss_max_z, v.startup_peak_tau[0], v.peak_tau[0],
                      v.peak_tau[1], v.peak_tau[2], v.box_violations, v.repaired_samples);
        out << buf;
    }
    out << "gains (min / max / final):\n";
    for (std::size_t i = 0; i < r.vehicles.size(); ++i) {
        const auto& v = r.vehicles[i];
        out << "  v" << i + 1 << ":";
        for (int k = 0; k < 3; ++k) {
            out << "  [" << fmt("%.4g", v.gain_min[k]) << " / " << fmt("%.4g", v.gain_max[k]) << " / "
                << fmt("%.4g", v.gain_final[k]) << "]";
        }
        out << '\n';
    }
    if (!r.finite) out << "WARNING: non-finite values in log\n";
    if (stability) out << format_stability(*stability);
    return out.str();
}

std::string format_ranking(const std::vector<MetricsReport>& reports) {
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return reports[a].mean_settling_time() < reports[b].mean_settling_time();
    });
    std::ostringstream out;
    out << "rank  controller  mean_settle[s]  mean_ss_e     mean_ss_z     max|tau1|_0   box_viol\n";
    int rank = 1;
    for (std::size_t idx : order) {
        const auto& r = reports[idx];
        double tau0 = 0.0;
        int viol = 0;
        for (const auto& v : r.vehicles) {
            tau0 = std::max(tau0, v.startup_peak_tau[0]);
            viol += v.box_violations;
        }
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-5d %-11s %-15.5g %-13.5g %-13.5g %-13.5g %d\n", rank++,
                      std::string(to_string(r.variant)).c_str(), r.mean_settling_time(), r.mean_ss_error(),
                      r.mean_ss_z(), tau0, viol);
        out << buf;
    }
    std::vector<std::size_t> by_z(reports.size());
    std::iota(by_z.begin(), by_z.end(), 0);
    std::stable_sort(by_z.begin(), by_z.end(),
                     [&](std::size_t a, std::size_t b) { return reports[a].mean_ss_z() < reports[b].mean_ss_z(); });
    out << "steady-state z ordering:";
    for (std::size_t k = 0; k < by_z.size(); ++k) {
        out << (k ? " < " : " ") << to_string(reports[by_z[k]].variant);
    }
    out << '\n';
    return out.str();
}

}  // namespace uuvsim
