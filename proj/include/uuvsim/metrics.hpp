// Run metrics and text/CSV output of simulation logs.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uuvsim/engine.hpp"
#include "uuvsim/stability.hpp"

namespace uuvsim {

struct VehicleMetrics {
    double initial_error = 0.0;
    double final_error = 0.0;
    /// First logged t after which ||e|| stays at or below
    /// settling_fraction * ||e(0)||; empty if it never settles.
    std::optional<double> settling_time;
    // over the last quarter of the horizon
    double ss_mean_error = 0.0;
    double ss_max_error = 0.0;
    double ss_mean_z = 0.0;
    double ss_max_z = 0.0;
    double late_sup_error = 0.0;  // sup ||e|| over the last half
    Vec3 peak_tau = Vec3::Zero();
    Vec3 startup_peak_tau = Vec3::Zero();
    int box_violations = 0;    // logged rho outside the box, repaired samples excluded
    int repaired_samples = 0;
    Vec3 gain_min = Vec3::Zero();
    Vec3 gain_max = Vec3::Zero();
    Vec3 gain_final = Vec3::Zero();
    double max_abs_theta = 0.0;
};

struct MetricsReport {
    std::string scenario;
    Variant variant = Variant::NBOC;
    double t_final = 0.0;
    double startup_window = 0.0;
    std::vector<VehicleMetrics> vehicles;
    bool finite = true;  // every logged quantity finite

    double mean_settling_time() const;  // +inf if any vehicle never settles
    double mean_ss_z() const;
    double mean_ss_error() const;
};

/// Tolerance used when checking logged rho against the box.
inline constexpr double kBoxTolerance = 1e-9;

/// Throws EmptyLog when the log has no records.
MetricsReport metrics(const SimLog& log);

std::vector<std::string> csv_columns(int fleet_size, bool controller_column = false);
void write_csv_header(std::ostream& out, int fleet_size, bool controller_column = false);
/// Data rows only; floats with 9 significant digits, LF line endings.
void write_csv_rows(std::ostream& out, const SimLog& log, bool controller_column = false);
void write_csv(std::ostream& out, const SimLog& log);

std::string format_summary(const MetricsReport& report,
                           const std::optional<StabilityReport>& stability = std::nullopt);
std::string format_stability(const StabilityReport& report);
/// One row per variant, ranked by mean settling time.
std::string format_ranking(const std::vector<MetricsReport>& reports);

}  // namespace uuvsim
