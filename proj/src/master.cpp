#include "twolevel/master.hpp"

#include <algorithm>
#include <cmath>

#include "twolevel/errors.hpp"

namespace twolevel {

MEForm me_form_from_name(const std::string& name) {
    if (name == "full") return MEForm::full;
    if (name == "reduced") return MEForm::reduced;
    if (name == "scaled") return MEForm::scaled;
    throw ValidationError("unknown master-equation form: " + name);
}

std::string me_form_name(MEForm form) {
    switch (form) {
        case MEForm::full: return "full";
        case MEForm::reduced: return "reduced";
        case MEForm::scaled: return "scaled";
    }
    return "?";
}

ComplexMatrix2 me_rhs_full(const ModelParams& p, const DriveSchedule& s, double t,
                           const DensityMatrix& rho, const DensityMatrix& rho0,
                           const QuadratureState& q) {
    const double f = field_projection(p, s, t);
    const double w = p.omega();
    const double w0p = p.omega0() + omega_plus(p);
    const cx i1(0.0, 1.0);

    const ComplexMatrix2 r = rho.matrix();
    const ComplexMatrix2 lambda0{rho0.rho_aa, std::exp(cx(0.0, -w * t)) * rho0.rho_ab,
                                 std::exp(cx(0.0, w * t)) * rho0.rho_ba(), rho0.rho_bb()};

    // (1/i)[(w0+W+) sz, rho] - (1/i) f [sx, Lambda0]
    ComplexMatrix2 d = (-i1 * w0p) * commutator(sigma_z(), r)
                     + (i1 * f) * commutator(sigma_x(), lambda0);
    // gamma (2 s- rho s+ - {s+ s-, rho})
    d = d + p.gamma * (2.0 * (sigma_minus() * r * sigma_plus())
                       - anticommutator(sigma_plus() * sigma_minus(), r));
    // f (-2A rho + 2A sx rho sx + B [[sy, rho], sx])
    d = d + (f * -2.0 * q.A) * r
          + (f * 2.0 * q.A) * (sigma_x() * r * sigma_x())
          + (f * q.B) * commutator(commutator(sigma_y(), r), sigma_x());
    return d;
}

std::pair<double, cx> me_rhs_reduced(const ModelParams& p, const DriveSchedule& s, double t,
                                     const DensityMatrix& rho, const DensityMatrix& rho0,
                                     const QuadratureState& q) {
    const double f = field_projection(p, s, t);
    const double w = p.omega();
    const double w0p = p.omega0() + omega_plus(p);
    const cx eiw = std::exp(cx(0.0, w * t));
    const cx eG = eiw * q.G;

    const double dpaa = (-2.0 * p.gamma - 4.0 * f * eG.real()) * rho.rho_aa
                      + 2.0 * f * (std::conj(eiw) * rho0.rho_ab).imag()
                      + 2.0 * f * eG.real();
    const cx dpab = (cx(0.0, -2.0 * w0p) - p.gamma - 2.0 * f * eG) * rho.rho_ab
                  + 2.0 * f * std::conj(eG) * rho.rho_ba()
                  + cx(0.0, f) * (1.0 - 2.0 * rho0.rho_aa);
    return {dpaa, dpab};
}

std::size_t me_min_steps(const ModelParams& p, MEForm form) {
    const double eps = p.dipole * p.E0;
    double fmax;
    if (form == MEForm::scaled) {
        // rotating-frame rates in t-units
        fmax = std::max({std::abs(p.detuning()), 2.0 * p.gamma, std::abs(omega_plus(p)),
                         std::abs(eps), eps * eps * p.T, 2.0 * M_PI / p.T});
    } else {
        fmax = std::max({p.omega() + std::abs(p.nu), std::abs(p.detuning()), 2.0 * p.gamma,
                         std::abs(omega_plus(p)), std::abs(eps)});
    }
    const double need = 10.0 * p.T * fmax / (2.0 * M_PI);
    return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(need)));
}

namespace {

struct MEState {
    double paa = 0.0;
    cx pab{};  // rho_ab, or tilde rho_ab in the scaled form
    cx G{};
    cx Gt{};
};

MEState axpy(const MEState& y, double a, const MEState& d) {
    return {y.paa + a * d.paa, y.pab + a * d.pab, y.G + a * d.G, y.Gt + a * d.Gt};
}

MEState rk4_combine(const MEState& y, double h, const MEState& k1, const MEState& k2,
                    const MEState& k3, const MEState& k4) {
    MEState r = y;
    r.paa += h / 6.0 * (k1.paa + 2.0 * k2.paa + 2.0 * k3.paa + k4.paa);
    r.pab += h / 6.0 * (k1.pab + 2.0 * k2.pab + 2.0 * k3.pab + k4.pab);
    r.G += h / 6.0 * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G);
    r.Gt += h / 6.0 * (k1.Gt + 2.0 * k2.Gt + 2.0 * k3.Gt + k4.Gt);
    return r;
}

} // namespace

METrajectory me_evolve(const ModelParams& p, const DriveSchedule& s, const DensityMatrix& rho0,
                       std::size_t steps, MEForm form, const MEOptions& opts) {
    const double T = s.period();
    if (steps < me_min_steps(p, form))
        throw ValidationError("me_evolve: step budget insufficient for requested accuracy");
    const std::size_t stride = std::max<std::size_t>(1, opts.sample_stride);

    const double w = p.omega();
    const double eps = p.dipole * p.E0;
    const double Om = omega_plus(p);
    const double Delta = p.detuning();
    const double half_eps = 0.5 * eps;

    METrajectory traj;
    traj.steps = steps;
    if (form == MEForm::scaled) {
        const double dT = std::abs(Delta * T);
        if (dT < 0.5 * M_PI || dT > 8.0 * M_PI)
            traj.notes.push_back("scaled form outside the resonance region: |Delta*T| = " +
                                 std::to_string(dT));
    }

    // derivative of the combined (state, quadrature) vector
    auto rhs = [&](double x, const MEState& y) {
        MEState d;
        if (form == MEForm::scaled) {
            const double t = x * T;
            const cx W = std::exp(cx(0.0, s.phase(t) - Delta * t));
            const cx GW = y.Gt * std::conj(W);
            const cx pba = std::conj(y.pab);
            d.paa = T * ((-2.0 * p.gamma - 2.0 * eps * GW.real()) * y.paa
                         + eps * ((W * rho0.rho_ab).imag() + GW.real()));
            d.pab = T * (-(cx(0.0, 2.0 * Om) + p.gamma + eps * GW) * y.pab
                         + eps * std::conj(y.Gt) * std::conj(W) * pba
                         + cx(0.0, half_eps) * (1.0 - 2.0 * rho0.rho_aa) * std::conj(W));
            d.Gt = T * half_eps * W;
            return d;
        }
        const double t = x;
        QuadratureState q;
        q.t = t;
        q.G = y.G;
        q.Gt = y.Gt;
        const cx eG = std::exp(cx(0.0, w * t)) * y.G;
        q.A = eG.real();
        q.B = eG.imag();
        const DensityMatrix rho{y.paa, y.pab};
        if (form == MEForm::full) {
            const ComplexMatrix2 dm = me_rhs_full(p, s, t, rho, rho0, q);
            d.paa = dm.a.real();
            d.pab = dm.b;
        } else {
            const auto [dpaa, dpab] = me_rhs_reduced(p, s, t, rho, rho0, q);
            d.paa = dpaa;
            d.pab = dpab;
        }
        d.G = field_projection(p, s, t) * std::exp(cx(0.0, -w * t));
        d.Gt = half_eps * std::exp(cx(0.0, s.phase(t) - Delta * t));
        return d;
    };

    const double span = (form == MEForm::scaled) ? 1.0 : T;
    const double h = span / static_cast<double>(steps);

    auto record = [&](double x, const MEState& y) {
        const double t = (form == MEForm::scaled) ? x * T : x;
        DensityMatrix rho{y.paa, y.pab};
        if (form == MEForm::scaled) rho.rho_ab = std::exp(cx(0.0, -w * t)) * y.pab;
        QuadratureState q;
        q.t = t;
        q.Gt = y.Gt;
        q.G = (form == MEForm::scaled) ? y.Gt : y.G;  // RWA stand-in for scaled
        const cx eG = std::exp(cx(0.0, w * t)) * q.G;
        q.A = eG.real();
        q.B = eG.imag();
        traj.t.push_back(t);
        traj.states.push_back(rho);
        traj.quadratures.push_back(q);
    };

    // |pab| is phase-invariant, so the spectrum test works on the tilde
    // coherence of the scaled form too
    auto monitor = [&](double x, const MEState& y) {
        const double t = (form == MEForm::scaled) ? x * T : x;
        const double excess =
            DensityMatrix{y.paa, y.pab}.physicality_excess(opts.physicality_tol);
        if (excess > 0.0) {
            ++traj.warning_count;
            if (traj.warnings.size() < 64) traj.warnings.push_back({t, excess});
        }
    };

    MEState y{rho0.rho_aa, rho0.rho_ab, cx{}, cx{}};
    record(0.0, y);
    monitor(0.0, y);
    for (std::size_t k = 0; k < steps; ++k) {
        const double x = static_cast<double>(k) * h;
        const double xm = x + 0.5 * h;
        const double xe = std::min(x + h, span);
        const MEState k1 = rhs(x, y);
        const MEState k2 = rhs(xm, axpy(y, 0.5 * h, k1));
        const MEState k3 = rhs(xm, axpy(y, 0.5 * h, k2));
        const MEState k4 = rhs(xe, axpy(y, h, k3));
        y = rk4_combine(y, h, k1, k2, k3, k4);
        monitor(xe, y);
        if ((k + 1) % stride == 0 || k + 1 == steps) record(xe, y);
    }
    traj.t.back() = T;
    return traj;
}

} // namespace twolevel
