#include "twolevel/closed.hpp"

#include <cmath>
#include <vector>

#include "twolevel/errors.hpp"
#include "twolevel/quadrature.hpp"

namespace twolevel {

ComplexMatrix2 bvector_dot_sigma(const BVector& b) {
    return {b.z, b.x - cx(0, 1) * b.y, b.x + cx(0, 1) * b.y, -1.0 * b.z};
}

BVector bvector_at(const ModelParams& p, const DriveSchedule& s, double t, cx Gt,
                   double Omega_plus) {
    const cx W = resonant_phase(p, s, t);
    const cx dGt = 0.5 * p.dipole * p.E0 * W;  // analytic dGt/dt
    const double R = Gt.real(), Q = Gt.imag();
    const double Rp = dGt.real(), Qp = dGt.imag();
    BVector b;
    b.x = 2.0 * (R * Rp + Q * Qp);
    b.y = 2.0 * (Q * Rp - R * Qp);
    b.z = cx(0.0, -2.0 * (Omega_plus + Rp * Q + R * Qp));
    return b;
}

TimeOrderedResult time_ordered_su2(const std::function<BVector(double)>& B, double t0, double t1,
                                   std::size_t initial_intervals, double tol,
                                   std::size_t max_intervals) {
    if (initial_intervals < 2) initial_intervals = 2;
    auto product = [&](std::size_t n) {
        const double h = (t1 - t0) / static_cast<double>(n);
        ComplexMatrix2 U = ComplexMatrix2::identity();
        for (std::size_t k = 0; k < n; ++k) {
            const double tm = t0 + (static_cast<double>(k) + 0.5) * h;
            const BVector b = B(tm);
            if (!all_finite(bvector_dot_sigma(b)))
                throw ValidationError("time_ordered_su2: non-finite generator");
            U = expm2(cx(h) * bvector_dot_sigma(b)) * U;  // later times on the left
        }
        return U;
    };

    std::size_t n = initial_intervals;
    ComplexMatrix2 prev = product(n);
    while (true) {
        n *= 2;
        const ComplexMatrix2 cur = product(n);
        const double d = max_abs(cur - prev);
        if (d < tol) return {cur, n, d};
        if (n >= max_intervals)
            throw ConvergenceError("time_ordered_su2: no convergence at interval cap", d);
        prev = cur;
    }
}

namespace {

// Nodes of the shared trapezoidal grid: W, cumulative Gt, and g = |Gt|^2.
struct Grid {
    double h = 0.0;
    std::vector<double> t;
    std::vector<cx> W;
    std::vector<cx> Gt;
};

Grid make_grid(const ModelParams& p, const DriveSchedule& s, double T, std::size_t n) {
    Grid g;
    g.h = T / static_cast<double>(n);
    g.t.resize(n + 1);
    g.W.resize(n + 1);
    g.Gt.resize(n + 1);
    const double half_eps = 0.5 * p.dipole * p.E0;
    for (std::size_t k = 0; k <= n; ++k) {
        g.t[k] = (k == n) ? T : static_cast<double>(k) * g.h;
        g.W[k] = resonant_phase(p, s, g.t[k]);
    }
    g.Gt[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        g.Gt[k + 1] = g.Gt[k] + 0.5 * g.h * half_eps * (g.W[k] + g.W[k + 1]);
    return g;
}

template <typename Value, typename Eval, typename Diff>
Value refine(Eval eval, Diff diff, const ClosedOptions& opts, const char* who) {
    std::size_t n = std::max<std::size_t>(2, opts.initial_intervals);
    Value prev = eval(n);
    while (true) {
        n *= 2;
        const Value cur = eval(n);
        const double d = diff(cur, prev);
        if (d < opts.tol) return cur;
        if (n >= opts.max_intervals)
            throw ConvergenceError(std::string(who) + ": no convergence at interval cap", d);
        prev = cur;
    }
}

} // namespace

double closed_rho_aa(const ModelParams& p, const DriveSchedule& s, double T,
                     const DensityMatrix& rho0, const ClosedOptions& opts) {
    validate(p);
    const double eps = p.dipole * p.E0;

    auto eval = [&](std::size_t n) {
        const Grid g = make_grid(p, s, T, n);
        const double gT = std::norm(g.Gt[n]);
        // integrand of the two bracket terms, overall decay folded in so the
        // e^{2(gamma t' + |Gt|^2)} weight never overflows
        double acc = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            const double gk = std::norm(g.Gt[k]);
            const double src = eps * (g.W[k] * rho0.rho_ab).imag()
                             + eps * (g.Gt[k] * std::conj(g.W[k])).real();  // d|Gt|^2/dt
            const double wgt = std::exp(-2.0 * (p.gamma * (T - g.t[k]) + gT - gk));
            const double trap = (k == 0 || k == n) ? 0.5 : 1.0;
            acc += trap * src * wgt * g.h;
        }
        return rho0.rho_aa * std::exp(-2.0 * (p.gamma * T + gT)) + acc;
    };
    auto diff = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
    return refine<double>(eval, diff, opts, "closed_rho_aa");
}

std::pair<cx, cx> closed_rho_ab(const ModelParams& p, const DriveSchedule& s, double T,
                                const DensityMatrix& rho0, const ClosedOptions& opts) {
    validate(p);
    const double eps = p.dipole * p.E0;
    const double Om = omega_plus(p);
    const double w0 = p.omega0();

    auto eval = [&](std::size_t n) {
        const Grid g = make_grid(p, s, T, n);
        auto bvec = [&](std::size_t k) { return bvector_at(p, s, g.t[k], g.Gt[k], Om); };
        auto dcol = [&](std::size_t k) {
            const cx d1 = cx(0.0, 0.5 * eps) * (1.0 - 2.0 * rho0.rho_aa) * std::conj(g.W[k]);
            return std::pair<cx, cx>{d1, std::conj(d1)};
        };
        auto scal = [&](std::size_t k) {
            // e^{gamma t' + Re^2 Gt - Im^2 Gt} with the overall
            // e^{-(gamma T + Re^2 Gt(T) - Im^2 Gt(T))} folded in
            const double reim = g.Gt[k].real() * g.Gt[k].real() - g.Gt[k].imag() * g.Gt[k].imag();
            const double reimT = g.Gt[n].real() * g.Gt[n].real() - g.Gt[n].imag() * g.Gt[n].imag();
            return std::exp(-(p.gamma * (T - g.t[k]) + reimT - reim));
        };

        ComplexMatrix2 U = ComplexMatrix2::identity();
        ComplexMatrix2 Uinv = ComplexMatrix2::identity();
        cx acc1{}, acc2{};
        {
            const auto [d1, d2] = dcol(0);
            const double w = scal(0);
            acc1 += 0.5 * g.h * w * (Uinv.a * d1 + Uinv.b * d2);
            acc2 += 0.5 * g.h * w * (Uinv.c * d1 + Uinv.d * d2);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const BVector ba = bvec(k), bb = bvec(k + 1);
            const BVector bm{0.5 * (ba.x + bb.x), 0.5 * (ba.y + bb.y), 0.5 * (ba.z + bb.z)};
            const ComplexMatrix2 gen = cx(g.h) * bvector_dot_sigma(bm);
            U = expm2(gen) * U;
            Uinv = Uinv * expm2(cx(-1.0) * gen);  // anti-ordered inverse
            const auto [d1, d2] = dcol(k + 1);
            const double w = scal(k + 1);
            const double trap = (k + 1 == n) ? 0.5 : 1.0;
            acc1 += trap * g.h * w * (Uinv.a * d1 + Uinv.b * d2);
            acc2 += trap * g.h * w * (Uinv.c * d1 + Uinv.d * d2);
        }
        const double gTre = g.Gt[n].real() * g.Gt[n].real();
        const double gTim = g.Gt[n].imag() * g.Gt[n].imag();
        const double mag = std::exp(-(p.gamma * T + gTre - gTim));
        const cx brace1 = acc1 + rho0.rho_ab * mag;
        const cx brace2 = acc2 + rho0.rho_ba() * mag;
        const cx rho_ab = (U.a * brace1 + U.b * brace2) * std::exp(cx(0.0, -2.0 * w0 * T));
        const cx rho_ba = (U.c * brace1 + U.d * brace2) * std::exp(cx(0.0, 2.0 * w0 * T));
        return std::pair<cx, cx>{rho_ab, rho_ba};
    };
    auto diff = [](const std::pair<cx, cx>& a, const std::pair<cx, cx>& b) {
        return std::abs(a.first - b.first) / std::max(1.0, std::abs(a.first));
    };
    return refine<std::pair<cx, cx>>(eval, diff, opts, "closed_rho_ab");
}

std::pair<double, cx> weakfield_closed(const ModelParams& p, const DriveSchedule& s, double t,
                                       const DensityMatrix& rho0, const ClosedOptions& opts) {
    validate(p);
    const double eps = p.dipole * p.E0;
    const double Om = omega_plus(p);
    const double w0 = p.omega0();
    const double Delta = p.detuning();

    auto eval = [&](std::size_t n) {
        const double h = t / static_cast<double>(n);
        double paa = 0.0;
        cx pab{};
        for (std::size_t k = 0; k <= n; ++k) {
            const double tp = (k == n) ? t : static_cast<double>(k) * h;
            const cx Wb = std::exp(cx(0.0, Delta * tp - s.phase(tp)));  // e^{i(Delta t' - phi)}
            const double trap = (k == 0 || k == n) ? 0.5 : 1.0;
            const cx iaa = cx(0.0, 0.5 * eps)
                         * (Wb * rho0.rho_ba() - std::conj(Wb) * rho0.rho_ab);
            paa += trap * h * (iaa * std::exp(cx(-2.0 * p.gamma * (t - tp), 0.0))).real();
            const cx iab = cx(0.0, 0.5 * eps) * (1.0 - 2.0 * rho0.rho_aa) * Wb;
            pab += trap * h * iab
                 * std::exp(cx(-p.gamma * (t - tp), 2.0 * Om * (tp - t)));
        }
        paa += rho0.rho_aa * std::exp(-2.0 * p.gamma * t);
        pab *= std::exp(cx(0.0, -2.0 * w0 * t));
        pab += rho0.rho_ab * std::exp(cx(-p.gamma * t, -2.0 * (Om + w0) * t));
        return std::pair<double, cx>{paa, pab};
    };
    auto diff = [](const std::pair<double, cx>& a, const std::pair<double, cx>& b) {
        const double d1 = std::abs(a.first - b.first) / std::max(1.0, std::abs(a.first));
        const double d2 = std::abs(a.second - b.second) / std::max(1.0, std::abs(a.second));
        return std::max(d1, d2);
    };
    if (t == 0.0) return {rho0.rho_aa, rho0.rho_ab};
    return refine<std::pair<double, cx>>(eval, diff, opts, "weakfield_closed");
}

} // namespace twolevel
