#include "uuvsim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "uuvsim/engine.hpp"
#include "uuvsim/metrics.hpp"
#include "uuvsim/stability.hpp"

namespace uuvsim {

namespace {

std::shared_ptr<spdlog::logger> logger() {
    if (auto existing = spdlog::get("uuvsim")) return existing;
    auto log = spdlog::stderr_logger_st("uuvsim");
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("UUVSIM_LOG_LEVEL")) {
        log->set_level(spdlog::level::from_str(env));
    }
    return log;
}

struct Options {
    std::string scenario;
    std::vector<std::string> controllers;
    std::string out;
    std::optional<double> t_final;
    std::optional<double> dt;
    std::string format = "summary";
};

// Loads and applies overrides; validation is left to the caller.
Scenario prepare(const Options& opt) {
    Scenario sc = load_scenario(opt.scenario);
    if (opt.t_final) sc.t_final = *opt.t_final;
    if (opt.dt) sc.dt = *opt.dt;
    return sc;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
    std::vector<Variant> out;
    for (const auto& name : names) {
        auto v = parse_variant(name);
        if (!v) throw CLI::ValidationError("--controller", "unknown controller '" + name + "'");
        out.push_back(*v);
    }
    return out;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        err << "error: cannot write '" << path << "'\n";
        return false;
    }
    return true;
}

std::string describe(const GuardFailure& f) {
    std::ostringstream s;
    s << "runtime guard " << to_string(f.kind) << " on vehicle " << f.vehicle + 1 << " at t = " << f.t
      << " s: " << f.message << " (state " << f.state.pack().transpose() << ")";
    return s.str();
}

std::optional<StabilityReport> run_stability(const Scenario& sc, Variant v, const SimLog& log) {
    if (!uses_shunting(v)) return std::nullopt;
    double theta = 0.0;
    for (double m : log.max_abs_theta) theta = std::max(theta, m);
    return check_stability_conditions(sc.gains_for(v), theta);
}

int cmd_run(const Options& opt, std::ostream& out, std::ostream& err) {
    Scenario sc = prepare(opt);
    if (!opt.controllers.empty()) {
        const auto vs = parse_variants(opt.controllers);
        if (vs.size() != 1) throw CLI::ValidationError("--controller", "run takes a single controller");
        sc.variant = vs.front();
    }
    sc.validate();
    logger()->info("running '{}' with {} for {} s", sc.name, to_string(sc.variant), sc.t_final);

    const RunResult result = run(sc, RunOptions{Execution::Parallel});
    std::ostringstream csv;
    write_csv(csv, result.log);
    std::string summary;
    if (!result.log.records.empty()) {
        summary = format_summary(metrics(result.log), run_stability(sc, sc.variant, result.log));
    }
    if (result.failure) summary += "PARTIAL: " + describe(*result.failure) + "\n";

    if (!opt.out.empty()) {
        if (!write_file(opt.out, csv.str(), err)) return kExitInvalid;
        if (!write_file(opt.out + ".summary.txt", summary, err)) return kExitInvalid;
    }
    if (opt.format == "csv") {
        if (opt.out.empty()) out << csv.str();
    } else {
        out << summary;
    }
    if (result.failure) {
        err << "error: " << describe(*result.failure) << '\n';
        return kExitGuard;
    }
    return kExitOk;
}

int cmd_compare(const Options& opt, std::ostream& out, std::ostream& err) {
    const auto variants = parse_variants(opt.controllers);
    if (std::set<Variant>(variants.begin(), variants.end()).size() < 2) {
        throw CLI::ValidationError("--controller", "compare needs at least two distinct controllers");
    }
    Scenario sc = prepare(opt);
    for (Variant v : variants) {
        Scenario probe = sc;
        probe.variant = v;
        probe.validate();
    }
    logger()->info("comparing {} controllers on '{}'", variants.size(), sc.name);

    const auto results = run_variants(sc, variants, Execution::Parallel);
    std::ostringstream csv;
    write_csv_header(csv, sc.size(), true);
    std::vector<MetricsReport> reports;
    std::string notes;
    bool failed = false;
    for (const auto& r : results) {
        write_csv_rows(csv, r.log, true);
        if (!r.log.records.empty()) reports.push_back(metrics(r.log));
        if (r.failure) {
            failed = true;
            notes += "PARTIAL: " + std::string(to_string(r.log.variant)) + " aborted, " + describe(*r.failure) + "\n";
        }
    }
    std::string table = format_ranking(reports) + notes;

    if (!opt.out.empty()) {
        if (!write_file(opt.out, csv.str(), err)) return kExitInvalid;
        if (!write_file(opt.out + ".summary.txt", table, err)) return kExitInvalid;
    }
    if (opt.format == "csv" && opt.out.empty()) {
        out << csv.str();
    } else {
        out << table;
    }
    if (failed) {
        err << notes;
        return kExitGuard;
    }
    return kExitOk;
}

int cmd_validate(const Options& opt, std::ostream& out, std::ostream& err) {
    Scenario sc = prepare(opt);
    const TopologyReport topo = validate_topology(sc.topology);
    out << "topology: " << sc.size() << " vehicles, min eig sym(L+B) = " << topo.min_sym_eigenvalue
        << (topo.ok() ? "  pass" : "  FAIL") << '\n';
    for (const auto& m : topo.messages) out << "  " << m << '\n';
    if (!topo.ok()) {
        err << "error: " << (topo.messages.empty() ? "topology invalid" : topo.messages.front()) << '\n';
        return kExitInvalid;
    }
    sc.validate();
    out << "scenario invariants: pass\n";
    const StabilityReport stab = check_stability_conditions(sc.gains_for(sc.variant), sc.theta_design_bound);
    out << format_stability(stab);
    if (!stab.all_pass()) {
        err << "error: stability conditions not met with the configured gains\n";
        return kExitInvalid;
    }
    return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributed formation-tracking simulator for underactuated UUVs", "uuvsim"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--scenario", opt.scenario, "scenario TOML file")->required();
        sub->add_option("--controller", opt.controllers, "NBOC | BOC | NBC | BC | BSMC")->delimiter(',');
        sub->add_option("--out", opt.out, "CSV output path; the summary goes to <out>.summary.txt");
        sub->add_option("--tfinal", opt.t_final, "override t_final [s]");
        sub->add_option("--dt", opt.dt, "override the integration step [s]");
        sub->add_option("--format", opt.format, "stdout report")->check(CLI::IsMember({"csv", "summary"}));
    };
    auto* run_cmd = app.add_subcommand("run", "simulate one controller");
    auto* compare_cmd = app.add_subcommand("compare", "simulate several controllers on one scenario");
    auto* validate_cmd = app.add_subcommand("validate", "check topology, scenario invariants and gain conditions");
    add_common(run_cmd);
    add_common(compare_cmd);
    add_common(validate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(opt, out, err);
        if (*compare_cmd) return cmd_compare(opt, out, err);
        return cmd_validate(opt, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return kExitInvalid;
    }
}

}  // namespace uuvsim
