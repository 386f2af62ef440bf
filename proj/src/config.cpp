#include "twolevel/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "twolevel/errors.hpp"
#include "twolevel/nh.hpp"

namespace twolevel {

Track track_from_name(const std::string& name) {
    if (name == "non-hermitian") return Track::non_hermitian;
    if (name == "master") return Track::master;
    throw ValidationError("unknown track: " + name);
}

std::string track_name(Track track) {
    return track == Track::non_hermitian ? "non-hermitian" : "master";
}

namespace {

const std::set<std::string> known_keys = {
    "E_a", "E_b", "nu", "delta_times_T", "gamma", "gamma_a", "gamma_b", "omega_c",
    "dipole", "E0", "T", "T_list", "steps", "schedule", "schedule_table",
    "rho_aa0", "re_rho_ab0", "im_rho_ab0", "track", "form", "tolerance"};

const std::set<std::string> required_keys = {"E_a", "E_b", "gamma", "omega_c",
                                             "dipole", "E0", "T"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ValidationError("config: bad number for key " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw ValidationError("config: trailing junk for key " + key + ": '" + v + "'");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ValidationError("config: empty list for key " + key);
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!known_keys.count(key)) throw ValidationError("config: unknown key: " + key);
        if (kv.count(key)) throw ValidationError("config: duplicate key: " + key);
        if (val.empty()) throw ValidationError("config: empty value for key: " + key);
        kv[key] = val;
    }

    for (const auto& key : required_keys)
        if (!kv.count(key)) throw ValidationError("config: missing required key: " + key);
    if (!kv.count("nu") && !kv.count("delta_times_T"))
        throw ValidationError("config: missing required key: nu (or delta_times_T)");
    if (kv.count("nu") && kv.count("delta_times_T"))
        throw ValidationError("config: give either nu or delta_times_T, not both");

    ExperimentConfig cfg;
    cfg.E_a = to_double("E_a", kv["E_a"]);
    cfg.E_b = to_double("E_b", kv["E_b"]);
    cfg.gamma = to_double("gamma", kv["gamma"]);
    cfg.omega_c = to_double("omega_c", kv["omega_c"]);
    cfg.dipole = to_double("dipole", kv["dipole"]);
    cfg.E0 = to_double("E0", kv["E0"]);
    cfg.T = to_double("T", kv["T"]);
    if (kv.count("nu")) cfg.nu = to_double("nu", kv["nu"]);
    if (kv.count("delta_times_T")) cfg.delta_times_T = to_double("delta_times_T", kv["delta_times_T"]);
    if (kv.count("gamma_a")) cfg.gamma_a = to_double("gamma_a", kv["gamma_a"]);
    if (kv.count("gamma_b")) cfg.gamma_b = to_double("gamma_b", kv["gamma_b"]);
    if (kv.count("T_list")) cfg.T_list = to_list("T_list", kv["T_list"]);
    if (kv.count("steps")) {
        const double s = to_double("steps", kv["steps"]);
        if (!(s >= 2) || s != std::floor(s))
            throw ValidationError("config: steps must be an integer >= 2");
        cfg.steps = static_cast<std::size_t>(s);
    }
    if (kv.count("schedule")) cfg.schedule = schedule_kind_from_name(kv["schedule"]);
    if (kv.count("schedule_table")) cfg.schedule_table = kv["schedule_table"];
    if (cfg.schedule == ScheduleKind::table && cfg.schedule_table.empty())
        throw ValidationError("config: schedule = table requires schedule_table");
    if (kv.count("rho_aa0")) cfg.rho_aa0 = to_double("rho_aa0", kv["rho_aa0"]);
    double re = 0.0, im = 0.0;
    if (kv.count("re_rho_ab0")) re = to_double("re_rho_ab0", kv["re_rho_ab0"]);
    if (kv.count("im_rho_ab0")) im = to_double("im_rho_ab0", kv["im_rho_ab0"]);
    cfg.rho_ab0 = cx(re, im);
    if (kv.count("track")) cfg.track = track_from_name(kv["track"]);
    if (kv.count("form")) cfg.form = me_form_from_name(kv["form"]);
    if (kv.count("tolerance")) cfg.tolerance = to_double("tolerance", kv["tolerance"]);
    if (!(cfg.tolerance > 0)) throw ValidationError("config: tolerance must be positive");

    if (cfg.rho_aa0 < 0.0 || cfg.rho_aa0 > 1.0)
        throw ValidationError("config: rho_aa0 outside [0, 1]");
    if (std::norm(cfg.rho_ab0) > cfg.rho_aa0 * (1.0 - cfg.rho_aa0) + 1e-12)
        throw ValidationError("config: initial coherence violates positivity");
    for (double t : cfg.T_list)
        if (!(t > 0)) throw ValidationError("config: T_list entries must be positive");

    cfg.model();  // run core validation now so bad physics fails on load
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ModelParams ExperimentConfig::model() const {
    ModelParams p;
    p.E_a = E_a;
    p.E_b = E_b;
    p.gamma = gamma;
    p.omega_c = omega_c;
    p.dipole = dipole;
    p.E0 = E0;
    p.T = T;
    // Delta pinned by the reference period when delta_times_T is given
    p.nu = nu ? *nu : (p.omega() - *delta_times_T / T);
    return validate(p);
}

NHParams ExperimentConfig::nh() const {
    const ModelParams p = model();
    NHParams n = nh_from_master(p);
    if (gamma_a) n.gamma_a = *gamma_a;
    if (gamma_b) n.gamma_b = *gamma_b;
    if (n.gamma_a < 0 || n.gamma_b < 0)
        throw ValidationError("config: negative decay rate gamma_a/gamma_b");
    return n;
}

DriveSchedule ExperimentConfig::make_schedule(double period) const {
    switch (schedule) {
        case ScheduleKind::linear: return DriveSchedule::linear(period);
        case ScheduleKind::smooth_sine: return DriveSchedule::smooth_sine(period);
        case ScheduleKind::table: {
            DriveSchedule s = DriveSchedule::from_table_file(schedule_table);
            if (std::abs(s.period() - T) > 1e-9 * T)
                throw ValidationError("config: schedule_table period does not match T");
            return s.with_period(period);
        }
    }
    throw ValidationError("config: bad schedule");
}

DensityMatrix ExperimentConfig::initial_density() const { return {rho_aa0, rho_ab0}; }

AmplitudePair ExperimentConfig::initial_amplitudes() const {
    // pure state with C_a real: rho_ab = C_a C_b*
    const double purity_gap = std::abs(std::norm(rho_ab0) - rho_aa0 * (1.0 - rho_aa0));
    if (purity_gap > 1e-9)
        throw ValidationError("config: non-hermitian track needs a pure initial state");
    const double ca = std::sqrt(rho_aa0);
    if (ca == 0.0) return {0.0, 1.0};
    return {ca, std::conj(rho_ab0) / ca};
}

std::vector<double> ExperimentConfig::sweep_periods() const {
    if (!T_list.empty()) {
        auto list = T_list;
        std::sort(list.begin(), list.end());
        return list;
    }
    const double unit = 2.0 * M_PI / model().omega();
    return {100.0 * unit, 200.0 * unit, 400.0 * unit, 800.0 * unit};
}

namespace {

std::size_t auto_steps(double period, double fmax, std::size_t floor_steps) {
    // keep fmax * h <= 1/128 so the RK4 error stays well under the oracles
    const double need = std::max(128.0 * fmax * period, static_cast<double>(floor_steps));
    return static_cast<std::size_t>(std::ceil(need));
}

} // namespace

std::size_t ExperimentConfig::steps_for(double period, MEForm f) const {
    ModelParams p = model();
    p.T = period;
    const std::size_t floor_steps = me_min_steps(p, f);
    if (steps) {
        // configured count refers to the reference period; keep h fixed
        const double scaled = std::ceil(static_cast<double>(*steps) * period / T);
        return std::max(floor_steps, static_cast<std::size_t>(scaled));
    }
    const double eps = std::abs(dipole) * E0;
    double fmax;
    if (f == MEForm::scaled)
        fmax = std::max({std::abs(p.detuning()), 2.0 * gamma, eps, eps * eps * period});
    else
        fmax = std::max({p.omega() + std::abs(p.nu), 2.0 * gamma, eps});
    return std::max(floor_steps, auto_steps(period, fmax, 1000));
}

std::size_t ExperimentConfig::nh_steps_for(double period) const {
    NHParams n = nh();
    const std::size_t floor_steps = nh_min_steps(n, period);
    if (steps) {
        const double scaled = std::ceil(static_cast<double>(*steps) * period / T);
        return std::max(floor_steps, static_cast<std::size_t>(scaled));
    }
    const double fmax = std::max({std::abs(n.Delta), std::abs(n.V0), n.gamma_a, n.gamma_b});
    return std::max(floor_steps, auto_steps(period, fmax, 1000));
}

} // namespace twolevel
