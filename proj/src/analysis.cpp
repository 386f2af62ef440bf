#include "twolevel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "twolevel/errors.hpp"
#include "twolevel/nh.hpp"

namespace twolevel {

FitResult fit_decay(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3) throw ValidationError("fit_decay: need at least 3 samples");
    std::set<double> distinct;
    for (const auto& s : samples) distinct.insert(s.first);
    if (distinct.size() < 3) throw ValidationError("fit_decay: need 3 distinct T values");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(samples.size());
    for (const auto& [x, y] : samples) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (det <= 0) throw ValidationError("fit_decay: degenerate (collinear) T values");
    FitResult fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    for (const auto& [x, y] : samples)
        fit.residual = std::max(fit.residual, std::abs(y - fit.slope * x - fit.intercept));
    return fit;
}

namespace {

double nh_log_survival(const ExperimentConfig& cfg, double period) {
    const NHParams nh = cfg.nh();
    const DriveSchedule sched = cfg.make_schedule(period);
    const AmplitudePair c0 = nh_adiabatic_initial_state(nh);
    const NHTrajectory traj =
        nh_evolve(nh, sched, c0, cfg.nh_steps_for(period), std::max<std::size_t>(1, cfg.nh_steps_for(period) / 64));
    return std::log(std::norm(traj.final().ca) / std::norm(traj.initial().ca));
}

struct MasterPoint {
    double log_ratio = 0.0;
    std::vector<PhysicalityWarning> warnings;
};

MasterPoint master_log_ratio(const ExperimentConfig& cfg, double period) {
    ModelParams p = cfg.model();
    p.T = period;
    const DriveSchedule sched = cfg.make_schedule(period);
    const DensityMatrix rho0 = cfg.initial_density();
    if (rho0.rho_aa <= 0.0)
        throw ValidationError("sweep_T: log rho_aa undefined for rho_aa(0) = 0");
    MEOptions opts;
    opts.sample_stride = std::max<std::size_t>(1, cfg.steps_for(period, cfg.form) / 64);
    const METrajectory traj =
        me_evolve(p, sched, rho0, cfg.steps_for(period, cfg.form), cfg.form, opts);
    MasterPoint out;
    out.log_ratio = std::log(traj.final().rho_aa / traj.initial().rho_aa);
    out.warnings = traj.warnings;
    return out;
}

} // namespace

PhaseReport sweep_T(const ExperimentConfig& cfg, unsigned threads) {
    const std::vector<double> periods = cfg.sweep_periods();
    if (periods.size() < 3) throw ValidationError("sweep_T: T_list needs at least 3 periods");

    PhaseReport report;
    report.track = cfg.track;

    auto point = [&cfg](double period) -> MasterPoint {
        if (cfg.track == Track::non_hermitian) return {nh_log_survival(cfg, period), {}};
        return master_log_ratio(cfg, period);
    };

    std::vector<MasterPoint> points(periods.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < periods.size(); ++i) points[i] = point(periods[i]);
    } else {
        std::vector<std::future<MasterPoint>> futs;
        futs.reserve(periods.size());
        for (double period : periods)
            futs.push_back(std::async(std::launch::async, point, period));
        for (std::size_t i = 0; i < futs.size(); ++i) points[i] = futs[i].get();
    }

    for (std::size_t i = 0; i < periods.size(); ++i) {
        report.per_T_samples.emplace_back(periods[i], points[i].log_ratio);
        for (const auto& w : points[i].warnings) report.warnings.push_back(w);
    }

    const FitResult fit = fit_decay(report.per_T_samples);
    report.fitted_slope = fit.slope;
    report.fitted_intercept = fit.intercept;
    report.fit_residual = fit.residual;

    // sliding 3-point windows: does the intercept settle on a nonzero value?
    for (std::size_t i = 0; i + 3 <= report.per_T_samples.size(); ++i) {
        const std::vector<std::pair<double, double>> win(report.per_T_samples.begin() + i,
                                                         report.per_T_samples.begin() + i + 3);
        report.window_intercepts.push_back(fit_decay(win).intercept);
    }

    if (cfg.track == Track::non_hermitian) {
        const NHParams nh = cfg.nh();
        report.gw_prediction = -2.0 * gw_phase(nh).beta_minus.imag();
        report.gw_dynamical_slope =
            gw_survival_components(nh, 1.0).dynamical;  // 2 Im lambda_a per unit T
    }
    return report;
}

Observable observable_from_name(const std::string& name) {
    if (name == "im-beta-minus") return Observable::im_beta_minus;
    if (name == "log-rho-aa") return Observable::log_rho_aa;
    if (name == "log-ca2") return Observable::log_ca2;
    throw ValidationError("unknown observable: " + name);
}

std::string observable_name(Observable o) {
    switch (o) {
        case Observable::im_beta_minus: return "im-beta-minus";
        case Observable::log_rho_aa: return "log-rho-aa";
        case Observable::log_ca2: return "log-ca2";
    }
    return "?";
}

ReparamReport reparam_test(const ExperimentConfig& cfg, Observable observable,
                           ScheduleKind schedule_b) {
    ExperimentConfig cfg_b = cfg;
    cfg_b.schedule = schedule_b;

    auto value = [observable](const ExperimentConfig& c) -> double {
        switch (observable) {
            case Observable::im_beta_minus:
                return gw_phase(c.nh()).beta_minus.imag();
            case Observable::log_ca2: {
                const NHParams nh = c.nh();
                const DriveSchedule sched = c.make_schedule(c.T);
                const AmplitudePair c0 = c.initial_amplitudes();
                const NHTrajectory traj = nh_evolve(nh, sched, c0, c.nh_steps_for(c.T),
                                                    c.nh_steps_for(c.T));
                return std::log(std::norm(traj.final().ca));
            }
            case Observable::log_rho_aa: {
                const ModelParams p = c.model();
                const DriveSchedule sched = c.make_schedule(c.T);
                MEOptions opts;
                opts.sample_stride = c.steps_for(c.T, c.form);
                const METrajectory traj = me_evolve(p, sched, c.initial_density(),
                                                    c.steps_for(c.T, c.form), c.form, opts);
                return std::log(traj.final().rho_aa);
            }
        }
        throw ValidationError("reparam_test: bad observable");
    };

    ReparamReport rep;
    rep.schedule_a = schedule_kind_name(cfg.schedule);
    rep.schedule_b = schedule_kind_name(schedule_b);
    rep.observable = observable;
    rep.value_a = value(cfg);
    rep.value_b = value(cfg_b);
    rep.relative = observable != Observable::im_beta_minus;
    rep.tolerance = cfg.tolerance;
    const double gap = std::abs(rep.value_a - rep.value_b);
    if (rep.relative) {
        const double scale = std::max(std::abs(rep.value_a), std::abs(rep.value_b));
        rep.invariant = gap <= rep.tolerance * std::max(scale, 1e-300);
    } else {
        rep.invariant = gap <= rep.tolerance;
    }
    return rep;
}

TrackComparison compare_tracks(const ExperimentConfig& cfg) {
    const ModelParams p = cfg.model();
    const NHParams nh = cfg.nh();
    const DriveSchedule sched = cfg.make_schedule(cfg.T);
    const std::size_t steps = std::max(cfg.steps_for(cfg.T, cfg.form), cfg.nh_steps_for(cfg.T));
    const std::size_t stride = std::max<std::size_t>(1, steps / 512);

    MEOptions opts;
    opts.sample_stride = stride;
    const METrajectory me = me_evolve(p, sched, cfg.initial_density(), steps, cfg.form, opts);
    const NHTrajectory nht = nh_evolve(nh, sched, cfg.initial_amplitudes(), steps, stride);
    if (me.t.size() != nht.t.size())
        throw ValidationError("compare_tracks: grid mismatch");

    TrackComparison out;
    out.t = me.t;
    out.rho_aa.reserve(me.t.size());
    out.ca2.reserve(me.t.size());
    out.deviation.reserve(me.t.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < me.t.size(); ++i) {
        const double raa = me.states[i].rho_aa;
        const double ca2 = std::norm(nht.states[i].ca);
        const double dev = std::abs(raa - ca2);
        out.rho_aa.push_back(raa);
        out.ca2.push_back(ca2);
        out.deviation.push_back(dev);
        out.max_deviation = std::max(out.max_deviation, dev);
        sum += dev;
    }
    out.mean_deviation = sum / static_cast<double>(me.t.size());
    return out;
}

} // namespace twolevel
