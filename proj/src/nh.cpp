#include "twolevel/nh.hpp"

#include <algorithm>
#include <cmath>

#include "twolevel/errors.hpp"

namespace twolevel {

AmplitudePair nh_rhs(const NHParams& p, const DriveSchedule& s, double t,
                     const AmplitudePair& state) {
    const double phi = s.phase(t);
    const cx V = p.V0 * std::exp(cx(0.0, -phi));
    const cx ca = state.ca, cb = state.cb;
    AmplitudePair d;
    d.ca = -0.5 * p.gamma_a * ca - cx(0, 1) * std::conj(V) * std::exp(cx(0.0, p.Delta * t)) * cb;
    d.cb = -0.5 * p.gamma_b * cb - cx(0, 1) * V * std::exp(cx(0.0, -p.Delta * t)) * ca;
    return d;
}

std::size_t nh_min_steps(const NHParams& p, double T) {
    const double fmax = std::max({std::abs(p.Delta), std::abs(p.V0), p.gamma_a});
    const double need = 10.0 * T * fmax / (2.0 * M_PI);
    return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(need)));
}

NHTrajectory nh_evolve(const NHParams& p, const DriveSchedule& s, const AmplitudePair& c0,
                       std::size_t steps, std::size_t sample_stride) {
    const double T = s.period();
    if (steps < nh_min_steps(p, T))
        throw ValidationError("nh_evolve: step budget insufficient for requested accuracy");
    if (sample_stride == 0) sample_stride = 1;

    const double h = T / static_cast<double>(steps);
    NHTrajectory traj;
    traj.steps = steps;
    traj.t.reserve(steps / sample_stride + 2);
    traj.states.reserve(steps / sample_stride + 2);
    traj.t.push_back(0.0);
    traj.states.push_back(c0);

    AmplitudePair y = c0;
    double prev_norm = y.norm2();
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const AmplitudePair k1 = nh_rhs(p, s, t, y);
        const AmplitudePair y2{y.ca + 0.5 * h * k1.ca, y.cb + 0.5 * h * k1.cb};
        const AmplitudePair k2 = nh_rhs(p, s, t + 0.5 * h, y2);
        const AmplitudePair y3{y.ca + 0.5 * h * k2.ca, y.cb + 0.5 * h * k2.cb};
        const AmplitudePair k3 = nh_rhs(p, s, t + 0.5 * h, y3);
        const AmplitudePair y4{y.ca + h * k3.ca, y.cb + h * k3.cb};
        const AmplitudePair k4 = nh_rhs(p, s, std::min(t + h, T), y4);
        y.ca += h / 6.0 * (k1.ca + 2.0 * k2.ca + 2.0 * k3.ca + k4.ca);
        y.cb += h / 6.0 * (k1.cb + 2.0 * k2.cb + 2.0 * k3.cb + k4.cb);

        const double n = y.norm2();
        traj.worst_norm_rise = std::max(traj.worst_norm_rise, n - prev_norm);
        prev_norm = n;

        if ((k + 1) % sample_stride == 0 || k + 1 == steps) {
            traj.t.push_back(static_cast<double>(k + 1) * h);
            traj.states.push_back(y);
        }
    }
    traj.t.back() = T;
    return traj;
}

namespace {

// sqrt(S), S = (Delta - i delta)^2 + 4 V0^2, principal branch Re >= 0.
cx branch_root(const NHParams& p) {
    const cx z = cx(p.Delta, -p.delta());
    return std::sqrt(z * z + 4.0 * p.V0 * p.V0);
}

GWPhase phase_from_root(const NHParams& p, cx root) {
    const cx z = cx(p.Delta, -p.delta());
    if (std::abs(root) == 0.0)
        throw ValidationError("gw_phase: undefined mixing angle (V0 = 0 and Delta = delta = 0)");
    GWPhase out;
    const cx cos_theta0 = z / root;
    out.theta0 = std::acos(cos_theta0);
    out.beta_minus = M_PI * (1.0 - cos_theta0);
    out.geometric_decay = std::exp(-2.0 * out.beta_minus.imag());
    return out;
}

} // namespace

GWPhase gw_phase(const NHParams& p) { return phase_from_root(p, branch_root(p)); }

GWPhase gw_phase_continuous(const NHParams& p, cx& sqrt_prev) {
    cx root = branch_root(p);
    if (std::abs(root + sqrt_prev) < std::abs(root - sqrt_prev)) root = -root;
    sqrt_prev = root;
    return phase_from_root(p, root);
}

AmplitudePair nh_adiabatic_initial_state(const NHParams& p) {
    const cx z = cx(p.Delta, -p.delta());
    const cx root = branch_root(p);
    if (std::abs(root) == 0.0)
        throw ValidationError("nh_adiabatic_initial_state: degenerate branches");
    // (z + root, 2 V0) spans the branch connected to |a>; at V0 = 0 it is |a>.
    AmplitudePair v{z + root, 2.0 * p.V0};
    const double n = std::sqrt(v.norm2());
    if (n == 0.0)
        throw ValidationError("nh_adiabatic_initial_state: null eigenvector");
    v.ca /= n;
    v.cb /= n;
    return v;
}

SurvivalComponents gw_survival_components(const NHParams& p, double T, std::size_t steps) {
    const cx root = branch_root(p);
    if (std::abs(root) < 1e-12 * std::max(1.0, std::abs(p.Delta) + p.gamma_a + std::abs(p.V0)))
        throw ValidationError("gw_survival_components: eigenvalue branches cross along the cycle");
    // lambda_a(t) = -i(gamma_a + gamma_b)/4 + root/2; independent of phi, so
    // the trapezoid along the cycle is exact, but integrate anyway to keep
    // the contract uniform.
    const double h = T / static_cast<double>(steps);
    double acc = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double wk = (k == 0 || k == steps) ? 0.5 : 1.0;
        const double im_lambda = -0.25 * (p.gamma_a + p.gamma_b) + 0.5 * root.imag();
        acc += wk * im_lambda * h;
    }
    SurvivalComponents out;
    out.dynamical = 2.0 * acc;
    out.geometric = -2.0 * gw_phase(p).beta_minus.imag();
    return out;
}

} // namespace twolevel
