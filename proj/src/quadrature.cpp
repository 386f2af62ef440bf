#include "twolevel/quadrature.hpp"

#include <cmath>

#include "twolevel/errors.hpp"

namespace twolevel {

double field_projection(const ModelParams& p, const DriveSchedule& s, double t) {
    return p.dipole * p.E0 * std::cos(p.nu * t + s.phase(t));
}

cx resonant_phase(const ModelParams& p, const DriveSchedule& s, double t) {
    return std::exp(cx(0.0, s.phase(t) - p.detuning() * t));
}

namespace {

struct Integrands {
    cx G{};
    cx W{};  // integrand of Gt before the m E0 / 2 factor
    double A = 0.0;
    double B = 0.0;
};

Integrands eval(const ModelParams& p, const DriveSchedule& s, double tp, double t) {
    const double f = field_projection(p, s, tp);
    const double w = p.omega();
    Integrands v;
    v.G = f * std::exp(cx(0.0, -w * tp));
    v.W = std::exp(cx(0.0, s.phase(tp) - p.detuning() * tp));
    v.A = f * std::cos(w * (t - tp));
    v.B = f * std::sin(w * (t - tp));
    return v;
}

QuadratureState simpson(const ModelParams& p, const DriveSchedule& s, double t,
                        std::size_t n) {
    // n even; composite Simpson over [0, t]
    const double h = t / static_cast<double>(n);
    Integrands sum, ends = eval(p, s, 0.0, t);
    const Integrands last = eval(p, s, t, t);
    sum.G = ends.G + last.G;
    sum.W = ends.W + last.W;
    sum.A = ends.A + last.A;
    sum.B = ends.B + last.B;
    for (std::size_t k = 1; k < n; ++k) {
        const double wk = (k % 2 == 1) ? 4.0 : 2.0;
        const Integrands v = eval(p, s, static_cast<double>(k) * h, t);
        sum.G += wk * v.G;
        sum.W += wk * v.W;
        sum.A += wk * v.A;
        sum.B += wk * v.B;
    }
    QuadratureState q;
    q.t = t;
    q.G = sum.G * (h / 3.0);
    q.Gt = sum.W * (h / 3.0) * (0.5 * p.dipole * p.E0);
    q.A = sum.A * (h / 3.0);
    q.B = sum.B * (h / 3.0);
    return q;
}

double rel_delta(const QuadratureState& a, const QuadratureState& b) {
    auto rd = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
    double d = rd(a.A, b.A);
    d = std::max(d, rd(a.B, b.B));
    d = std::max(d, std::abs(a.G - b.G) / std::max(1.0, std::abs(b.G)));
    d = std::max(d, std::abs(a.Gt - b.Gt) / std::max(1.0, std::abs(b.Gt)));
    return d;
}

} // namespace

QuadratureState quadratures_to(const ModelParams& p, const DriveSchedule& s, double t,
                               std::size_t max_intervals, double tol) {
    if (t < 0 || t > s.period() * (1.0 + 1e-12))
        throw ValidationError("quadratures_to: time outside [0, T]");
    if (max_intervals < 2) throw ValidationError("quadratures_to: need at least 2 intervals");
    if (t == 0.0 || p.E0 == 0.0) return QuadratureState{.t = t};

    std::size_t n = 64;
    QuadratureState prev = simpson(p, s, t, n);
    while (true) {
        n *= 2;
        const QuadratureState cur = simpson(p, s, t, n);
        const double d = rel_delta(prev, cur);
        if (d < tol) return cur;
        if (n >= max_intervals)
            throw ConvergenceError("quadratures_to: no convergence at interval cap", d);
        prev = cur;
    }
}

} // namespace twolevel
