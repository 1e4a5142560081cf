#include "uuvsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace uuvsim {

// ---------------------------------------------------------------------------
// disturbances

double DisturbanceProfile::amplitude_bound(int vehicle) const {
    if (channels.empty()) return 0.0;
    const auto& ch = channels.size() == 1 ? channels.front() : channels.at(vehicle);
    double sum = 0.0;
    for (const auto& c : ch) sum += c.amplitude * c.amplitude;
    return std::sqrt(sum);
}

void DisturbanceProfile::validate(int fleet_size) const {
    if (!enabled) return;
    if (channels.size() != 1 && static_cast<int>(channels.size()) != fleet_size) {
        throw Error(ErrorKind::InvalidScenario,
                    "disturbance profile needs one channel set or one per vehicle");
    }
    for (const auto& set : channels) {
        for (const auto& c : set) {
            if (!std::isfinite(c.amplitude) || !std::isfinite(c.omega) || !std::isfinite(c.phase)) {
                throw Error(ErrorKind::InvalidScenario, "DisturbanceProfile invariant violated: non-finite channel");
            }
        }
    }
    for (int i = 0; i < fleet_size; ++i) {
        const double bound = amplitude_bound(i);
        if (bound > norm_cap) {
            throw Error(ErrorKind::InvalidScenario,
                        "Assumption 3 violated: disturbance bound " + std::to_string(bound) +
                            " on vehicle " + std::to_string(i + 1) + " exceeds cap alpha_1 = " +
                            std::to_string(norm_cap));
        }
    }
}

DisturbanceVector disturbance_at(const DisturbanceProfile& profile, int vehicle, double t) {
    DisturbanceVector d = DisturbanceVector::Zero();
    if (!profile.enabled || profile.channels.empty()) return d;
    const auto& set = profile.channels.size() == 1 ? profile.channels.front() : profile.channels.at(vehicle);
    for (int c = 0; c < 5; ++c) {
        const auto& ch = set[c];
        const double arg = ch.omega * t + ch.phase;
        d[c] = ch.amplitude * (ch.cosine ? std::cos(arg) : std::sin(arg));
    }
    return d;
}

// ---------------------------------------------------------------------------
// scenario

int Scenario::ticks_per_sample() const { return static_cast<int>(std::llround(dt_sample / dt)); }

long long Scenario::total_ticks() const { return std::llround(t_final / dt); }

const VariantGains& Scenario::variant_gain(Variant v) const {
    auto it = variant_gains.find(v);
    if (it == variant_gains.end()) {
        throw Error(ErrorKind::InvalidScenario,
                    "no gains configured for controller " + std::string(to_string(v)));
    }
    return it->second;
}

ControllerGains Scenario::gains_for(Variant v) const {
    ControllerGains g = controller;
    const auto& vg = variant_gain(v);
    g.inner = vg.inner_gain;
    if (v == Variant::BSMC) g.smc.gains = vg.inner_gain;
    return g;
}

void Scenario::validate() const {
    const int n = size();
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidScenario, msg); };

    if (static_cast<int>(params.size()) != n || static_cast<int>(initial.size()) != n) {
        fail("Scenario invariant violated: vehicle count differs between topology, params and initial states");
    }
    for (const auto& p : params) p.validate();

    validate_topology(topology).throw_if_invalid();

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (topology.weight(i, j) > 0.0) formation.offset(i, j);
        }
    }

    for (int i = 0; i < n; ++i) {
        const auto& s = initial[i];
        if (!s.pack().allFinite()) fail("VehicleState invariant violated: non-finite initial state");
        if (std::abs(s.theta()) >= std::numbers::pi / 2.0 - guards.attitude_margin) {
            fail("VehicleState invariant violated: initial |theta| of vehicle " + std::to_string(i + 1) +
                 " must be < pi/2");
        }
    }
    if (!reference_start.allFinite() || !reference_velocity.allFinite()) {
        fail("Assumption 2 violated: reference must be finite");
    }

    if (!(dt > 0.0)) fail("Scenario invariant violated: dt must be > 0");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) fail("Scenario invariant violated: t_final must be >= 0");
    if (!(dt_sample > 0.0)) fail("Scenario invariant violated: dt_sample must be > 0");
    const double ratio = dt_sample / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0) {
        fail("Scenario invariant violated: dt_sample must be an integer multiple of dt");
    }
    const double samples = t_final / dt_sample;
    if (std::abs(samples - std::round(samples)) > 1e-9 * std::max(1.0, samples)) {
        fail("Scenario invariant violated: t_final must be a multiple of dt_sample");
    }
    if (!(settling_fraction > 0.0 && settling_fraction < 1.0)) {
        fail("Scenario invariant violated: settling_fraction must lie in (0, 1)");
    }
    if (!(guards.attitude_margin > 0.0) || !(guards.speed_floor > 0.0)) {
        fail("Scenario invariant violated: guard margins must be > 0");
    }

    disturbance.validate(n);

    const auto& vg = variant_gain(variant);
    if (!(vg.virtual_gain.array() > 0.0).all()) {
        throw Error(ErrorKind::NonPositiveGain, "virtual gains must be strictly positive");
    }
    gains_for(variant).validate();
    if (controller.filter_tau < 2.0 * dt) fail("Scenario invariant violated: filter_tau must be >= 2 dt");

    GainQpProblem probe;
    probe.weights = optimizer.weights;
    probe.rho_lo = optimizer.rho_lo;
    probe.rho_hi = optimizer.rho_hi;
    probe.k_min = optimizer.k_min;
    probe.dt_sample = dt_sample;
    probe.validate();
}

// ---------------------------------------------------------------------------
// TOML loading

namespace {

[[noreturn]] void schema_error(const std::string& source, const std::string& msg) {
    throw Error(ErrorKind::InvalidScenario, source + ": " + msg);
}

struct Reader {
    std::string source;

    double number(const toml::node& node, const std::string& key) const {
        if (auto v = node.value<double>()) return *v;
        schema_error(source, "'" + key + "' must be a number");
    }

    double number_or(const toml::table& t, const std::string& key, double fallback) const {
        const toml::node* node = t.get(key);
        return node ? number(*node, key) : fallback;
    }

    std::vector<double> numbers(const toml::node& node, const std::string& key) const {
        const auto* arr = node.as_array();
        if (!arr) schema_error(source, "'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& el : *arr) out.push_back(number(el, key));
        return out;
    }

    template <int N>
    Eigen::Matrix<double, N, 1> vec(const toml::node& node, const std::string& key) const {
        const auto v = numbers(node, key);
        if (static_cast<int>(v.size()) != N) {
            schema_error(source, "'" + key + "' must have " + std::to_string(N) + " entries");
        }
        Eigen::Matrix<double, N, 1> out;
        for (int i = 0; i < N; ++i) out[i] = v[i];
        return out;
    }

    template <int N>
    Eigen::Matrix<double, N, 1> vec_or(const toml::table& t, const std::string& key,
                                       const Eigen::Matrix<double, N, 1>& fallback) const {
        const toml::node* node = t.get(key);
        return node ? vec<N>(*node, key) : fallback;
    }

    // Diagonal given as a 3-vector, or a full 3x3 nested array.
    Mat3 weight_matrix(const toml::table& t, const std::string& key, const Mat3& fallback) const {
        const toml::node* node = t.get(key);
        if (!node) return fallback;
        const auto* arr = node->as_array();
        if (arr && !arr->empty() && arr->front().is_array()) {
            if (arr->size() != 3) schema_error(source, "'" + key + "' must be 3x3");
            Mat3 m;
            for (int r = 0; r < 3; ++r) m.row(r) = vec<3>((*arr)[r], key).transpose();
            return m;
        }
        return vec<3>(*node, key).asDiagonal();
    }

    const toml::table& table(const toml::table& t, const std::string& key) const {
        static const toml::table empty;
        const toml::node* node = t.get(key);
        if (!node) return empty;
        if (!node->is_table()) schema_error(source, "'" + key + "' must be a table");
        return *node->as_table();
    }

    VehicleParams params(const toml::table& t, VehicleParams p) const {
        p.mass = number_or(t, "mass", p.mass);
        p.inertia_y = number_or(t, "inertia_y", p.inertia_y);
        p.inertia_z = number_or(t, "inertia_z", p.inertia_z);
        p.added_u = number_or(t, "added_u", p.added_u);
        p.added_v = number_or(t, "added_v", p.added_v);
        p.added_w = number_or(t, "added_w", p.added_w);
        p.added_q = number_or(t, "added_q", p.added_q);
        p.added_r = number_or(t, "added_r", p.added_r);
        p.damping_u = number_or(t, "damping_u", p.damping_u);
        p.damping_v = number_or(t, "damping_v", p.damping_v);
        p.damping_w = number_or(t, "damping_w", p.damping_w);
        p.damping_q = number_or(t, "damping_q", p.damping_q);
        p.damping_r = number_or(t, "damping_r", p.damping_r);
        p.restoring = number_or(t, "restoring", p.restoring);
        return p;
    }

    DisturbanceChannels channels(const toml::node& node) const {
        const auto* arr = node.as_array();
        if (!arr || arr->size() != 5) schema_error(source, "disturbance 'channels' must list 5 tables");
        DisturbanceChannels out;
        for (int c = 0; c < 5; ++c) {
            const auto* t = (*arr)[c].as_table();
            if (!t) schema_error(source, "disturbance channel must be a table");
            out[c].amplitude = number_or(*t, "amplitude", 0.0);
            out[c].omega = number_or(*t, "omega", 1.0);
            out[c].phase = number_or(*t, "phase", 0.0);
            const std::string wave = (*t)["waveform"].value_or(std::string("sin"));
            if (wave != "sin" && wave != "cos") schema_error(source, "waveform must be 'sin' or 'cos'");
            out[c].cosine = wave == "cos";
        }
        return out;
    }
};

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source << ": TOML parse error: " << e.description() << " at line "
            << e.source().begin.line;
        throw Error(ErrorKind::InvalidScenario, msg.str());
    }
    const Reader rd{source};
    Scenario sc;
    sc.name = root["name"].value_or(std::string("scenario"));

    const auto& sim = rd.table(root, "simulation");
    sc.dt = rd.number_or(sim, "dt", sc.dt);
    sc.dt_sample = rd.number_or(sim, "dt_sample", sc.dt_sample);
    sc.t_final = rd.number_or(sim, "t_final", sc.t_final);
    sc.settling_fraction = rd.number_or(sim, "settling_fraction", sc.settling_fraction);
    if (auto name = sim["controller"].value<std::string>()) {
        auto v = parse_variant(*name);
        if (!v) schema_error(source, "unknown controller '" + *name + "'");
        sc.variant = *v;
    }

    const auto& guards = rd.table(root, "guards");
    sc.guards.attitude_margin = rd.number_or(guards, "attitude_margin", sc.guards.attitude_margin);
    sc.guards.speed_floor = rd.number_or(guards, "speed_floor", sc.guards.speed_floor);

    // topology
    const auto& topo = rd.table(root, "topology");
    if (!topo.contains("adjacency") || !topo.contains("pinning")) {
        schema_error(source, "[topology] needs 'adjacency' and 'pinning'");
    }
    const auto pin = rd.numbers(*topo.get("pinning"), "pinning");
    const int n = static_cast<int>(pin.size());
    const auto* rows = topo.get("adjacency")->as_array();
    if (!rows || static_cast<int>(rows->size()) != n) {
        schema_error(source, "'adjacency' must have one row per vehicle");
    }
    Eigen::MatrixXd adj(n, n);
    for (int i = 0; i < n; ++i) {
        const auto row = rd.numbers((*rows)[i], "adjacency");
        if (static_cast<int>(row.size()) != n) schema_error(source, "'adjacency' rows must have n entries");
        for (int j = 0; j < n; ++j) adj(i, j) = row[j];
    }
    try {
        sc.topology = FleetTopology(adj, Eigen::Map<const Eigen::VectorXd>(pin.data(), n));
    } catch (const Error& e) {
        schema_error(source, e.what());
    }

    // reference and formation
    const auto& ref = rd.table(root, "reference");
    sc.reference_start = rd.vec_or<3>(ref, "start", Vec3::Zero());
    sc.reference_velocity = rd.vec_or<3>(ref, "velocity", Vec3::Zero());
    sc.formation = FormationSpec(linear_reference(sc.reference_start, sc.reference_velocity));
    if (const auto* offsets = root["formation"].as_array()) {
        for (const auto& el : *offsets) {
            const auto* t = el.as_table();
            if (!t || !t->contains("pair") || !t->contains("delta")) {
                schema_error(source, "[[formation]] entries need 'pair' and 'delta'");
            }
            const auto pair = rd.numbers(*t->get("pair"), "pair");
            if (pair.size() != 2) schema_error(source, "'pair' must name two vehicles");
            const int i = static_cast<int>(pair[0]) - 1, j = static_cast<int>(pair[1]) - 1;
            if (i < 0 || j < 0 || i >= n || j >= n) schema_error(source, "formation pair index out of range");
            try {
                sc.formation.set_offset(i, j, rd.vec<3>(*t->get("delta"), "delta"));
            } catch (const Error& e) {
                schema_error(source, e.what());
            }
        }
    }

    // vehicles
    const VehicleParams shared = rd.params(rd.table(root, "vehicle_params"), VehicleParams{});
    const auto* vehicles = root["vehicles"].as_array();
    if (!vehicles || static_cast<int>(vehicles->size()) != n) {
        schema_error(source, "[[vehicles]] must list one initial state per vehicle");
    }
    for (const auto& el : *vehicles) {
        const auto* t = el.as_table();
        if (!t) schema_error(source, "[[vehicles]] entries must be tables");
        if (t->contains("reference")) {
            schema_error(source, "per-vehicle references are not supported; all vehicles share [reference]");
        }
        VehicleState s;
        s.position = rd.vec_or<3>(*t, "position", Vec3::Zero());
        s.attitude = rd.vec_or<2>(*t, "attitude", Vec2::Zero());
        s.linear_vel = rd.vec_or<3>(*t, "linear_velocity", Vec3::Zero());
        s.angular_vel = rd.vec_or<2>(*t, "angular_velocity", Vec2::Zero());
        sc.initial.push_back(s);
        sc.params.push_back(rd.params(rd.table(*t, "params"), shared));
    }

    // disturbances
    const auto& dist = rd.table(root, "disturbance");
    sc.disturbance.enabled = dist["enabled"].value_or(false);
    sc.disturbance.norm_cap = rd.number_or(dist, "norm_cap", sc.disturbance.norm_cap);
    if (const toml::node* ch = dist.get("channels")) {
        sc.disturbance.channels.push_back(rd.channels(*ch));
    } else if (const auto* per = dist["vehicle"].as_array()) {
        for (const auto& el : *per) {
            const auto* t = el.as_table();
            if (!t || !t->contains("channels")) schema_error(source, "[[disturbance.vehicle]] needs 'channels'");
            sc.disturbance.channels.push_back(rd.channels(*t->get("channels")));
        }
    }

    // controllers
    const auto& ctl = rd.table(root, "controller");
    sc.controller.k_theta = rd.number_or(ctl, "k_theta", sc.controller.k_theta);
    sc.controller.k_psi = rd.number_or(ctl, "k_psi", sc.controller.k_psi);
    sc.controller.filter_tau = rd.number_or(ctl, "filter_tau", sc.controller.filter_tau);
    sc.theta_design_bound = rd.number_or(ctl, "theta_design_bound", sc.theta_design_bound);
    const auto& sh = rd.table(ctl, "shunting");
    sc.controller.shunting.decay = rd.vec_or<3>(sh, "decay", sc.controller.shunting.decay);
    sc.controller.shunting.upper = rd.vec_or<3>(sh, "upper", sc.controller.shunting.upper);
    sc.controller.shunting.lower = rd.vec_or<3>(sh, "lower", sc.controller.shunting.lower);
    const auto& smc = rd.table(ctl, "smc");
    sc.controller.smc.boundary_layer = rd.number_or(smc, "boundary_layer", sc.controller.smc.boundary_layer);

    const auto& variants = rd.table(root, "variants");
    for (const auto& [key, node] : variants) {
        auto v = parse_variant(key.str());
        if (!v) schema_error(source, "unknown controller variant '" + std::string(key.str()) + "'");
        const auto* t = node.as_table();
        if (!t) schema_error(source, "[variants." + std::string(key.str()) + "] must be a table");
        VariantGains g;
        g.virtual_gain = rd.vec_or<3>(*t, "virtual_gain", g.virtual_gain);
        g.inner_gain = rd.vec_or<3>(*t, "inner_gain", g.inner_gain);
        sc.variant_gains[*v] = g;
    }

    const auto& opt = rd.table(root, "optimizer");
    auto& w = sc.optimizer.weights;
    w.q = rd.weight_matrix(opt, "q", w.q);
    w.r1 = rd.weight_matrix(opt, "r1", w.r1);
    w.r2 = rd.weight_matrix(opt, "r2", w.r2);
    if (const toml::node* pn = opt.get("p"); pn && !pn->is_array()) {
        w.p = Vec3::Constant(rd.number(*pn, "p"));
    } else {
        w.p = rd.vec_or<3>(opt, "p", w.p);
    }
    sc.optimizer.rho_lo = rd.vec_or<3>(opt, "rho_lo", sc.optimizer.rho_lo);
    sc.optimizer.rho_hi = rd.vec_or<3>(opt, "rho_hi", sc.optimizer.rho_hi);
    sc.optimizer.k_min = rd.number_or(opt, "k_min", sc.optimizer.k_min);
    sc.optimizer.dt_sample = sc.dt_sample;

    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::InvalidScenario, "cannot open scenario file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

}  // namespace uuvsim
