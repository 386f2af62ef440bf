#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "twolevel/closed.hpp"
#include "twolevel/errors.hpp"
#include "twolevel/master.hpp"
#include "twolevel/quadrature.hpp"

using namespace twolevel;

namespace {

constexpr double two_pi = 2.0 * M_PI;

ModelParams params(double gamma, double E0, double T, double Delta) {
    ModelParams p;
    p.E_a = 1.0;
    p.E_b = -1.0;
    p.gamma = gamma;
    p.omega_c = 3.0;
    p.dipole = 1.0;
    p.E0 = E0;
    p.T = T;
    p.nu = p.omega() - Delta;
    return validate(p);
}

// Gt on a dense grid with linear interpolation, shared input for the
// propagator comparisons
struct GtTable {
    double T, h;
    std::vector<cx> v;

    GtTable(const ModelParams& p, const DriveSchedule& s, std::size_t n) : T(s.period()) {
        h = T / static_cast<double>(n);
        v.resize(n + 1);
        v[0] = 0.0;
        const double c = 0.5 * p.dipole * p.E0;
        cx prev = resonant_phase(p, s, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const cx cur = resonant_phase(p, s, static_cast<double>(k + 1) * h);
            v[k + 1] = v[k] + 0.5 * h * c * (prev + cur);
            prev = cur;
        }
    }
    cx operator()(double t) const {
        const double x = std::clamp(t / h, 0.0, static_cast<double>(v.size() - 1));
        const std::size_t k = std::min(static_cast<std::size_t>(x), v.size() - 2);
        const double f = x - static_cast<double>(k);
        return v[k] * (1.0 - f) + v[k + 1] * f;
    }
};

// independent oracle: classical RK4 on dU/dt = (B(t).sigma) U
ComplexMatrix2 propagator_rk4(const std::function<BVector(double)>& B, double t0, double t1,
                              std::size_t n) {
    const double h = (t1 - t0) / static_cast<double>(n);
    ComplexMatrix2 U = ComplexMatrix2::identity();
    auto rhs = [&B](double t, const ComplexMatrix2& u) { return bvector_dot_sigma(B(t)) * u; };
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const ComplexMatrix2 k1 = rhs(t, U);
        const ComplexMatrix2 k2 = rhs(t + 0.5 * h, U + cx(0.5 * h) * k1);
        const ComplexMatrix2 k3 = rhs(t + 0.5 * h, U + cx(0.5 * h) * k2);
        const ComplexMatrix2 k4 = rhs(t + h, U + cx(h) * k3);
        U = U + cx(h / 6.0) * (k1 + cx(2.0) * k2 + cx(2.0) * k3 + k4);
    }
    return U;
}

} // namespace

TEST_CASE("bvector components match finite differences of the quadratures") {
    const double T = 80.0;
    const ModelParams p = params(0.02, 0.2, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::smooth_sine(T);
    const double Om = omega_plus(p);

    auto fd_error = [&](double t, double h) {
        const cx gm = quadratures_to(p, s, t - h).Gt;
        const cx g0 = quadratures_to(p, s, t).Gt;
        const cx gp = quadratures_to(p, s, t + h).Gt;
        const BVector b = bvector_at(p, s, t, g0, Om);
        const double bx_fd = (std::norm(gp) - std::norm(gm)) / (2.0 * h);
        const double dre = (gp.real() - gm.real()) / (2.0 * h);
        const double dim = (gp.imag() - gm.imag()) / (2.0 * h);
        const double by_fd = 2.0 * (g0.imag() * dre - g0.real() * dim);
        const double bz_fd = -2.0 * (Om + dre * g0.imag() + g0.real() * dim);
        return std::max({std::abs(b.x.real() - bx_fd), std::abs(b.y.real() - by_fd),
                         std::abs(b.z.imag() - bz_fd)});
    };
    for (double t : {0.2 * T, 0.5 * T, 0.8 * T}) {
        const double e1 = fd_error(t, 0.5);
        const double e2 = fd_error(t, 0.25);
        CHECK(e1 / e2 > 3.0);
        CHECK(e1 / e2 < 5.0);
        CHECK(e2 < 1e-4);
    }
}

TEST_CASE("time ordering of a vanishing generator is the identity") {
    const auto r = time_ordered_su2([](double) { return BVector{}; }, 0.0, 5.0);
    CHECK(max_abs(r.U - ComplexMatrix2::identity()) < 1e-15);
}

TEST_CASE("commuting case: constant z-generator exponentiates directly") {
    const cx b(0.3, -0.2);
    const double span = 2.0;
    const auto r = time_ordered_su2([b](double) { return BVector{0.0, 0.0, b}; }, 1.0, 3.0);
    CHECK(std::abs(r.U.a - std::exp(b * span)) < 1e-12);
    CHECK(std::abs(r.U.d - std::exp(-b * span)) < 1e-12);
    CHECK(std::abs(r.U.b) == 0.0);
    CHECK(std::abs(r.U.c) == 0.0);
}

TEST_CASE("ordered product matches the ODE propagator on a generic run") {
    const double T = 100.0;
    const ModelParams p = params(0.02, 0.04, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::smooth_sine(T);
    const double Om = omega_plus(p);
    const GtTable gt(p, s, 1 << 16);
    auto B = [&](double t) { return bvector_at(p, s, t, gt(t), Om); };

    const auto r = time_ordered_su2(B, 0.0, T, 64, 1e-10);
    const ComplexMatrix2 oracle = propagator_rk4(B, 0.0, T, 200000);
    CHECK(max_abs(r.U - oracle) < 1e-8);
}

TEST_CASE("time ordering reports non-convergence at the cap") {
    // generator oscillating far beyond what the interval cap can resolve
    auto B = [](double t) { return BVector{std::cos(3e7 * t), 0.0, 0.0}; };
    CHECK_THROWS_AS(time_ordered_su2(B, 0.0, 1.0, 2, 1e-12, 1 << 8), ConvergenceError);
}

TEST_CASE("closed rho_aa: zero field reduces to the bare exponential") {
    const double T = 50.0;
    const ModelParams p = params(0.05, 0.0, T, two_pi / T);
    const DensityMatrix rho0{0.8, cx(0.1, 0.2)};
    const double got = closed_rho_aa(p, DriveSchedule::linear(T), T, rho0);
    CHECK(got == doctest::Approx(0.8 * std::exp(-5.0)).epsilon(1e-12));
}

TEST_CASE("closed rho_aa: no dynamics at all") {
    const double T = 25.0;
    const ModelParams p = params(0.0, 0.0, T, two_pi / T);
    const double got = closed_rho_aa(p, DriveSchedule::linear(T), T, {0.37, 0.0});
    CHECK(got == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("closed rho_aa matches the scaled-form integration at weak field") {
    const double T = 100.0;
    const ModelParams p = params(0.02, 0.01, T, two_pi / T);
    for (auto kind : {ScheduleKind::linear, ScheduleKind::smooth_sine}) {
        const DriveSchedule s = kind == ScheduleKind::linear ? DriveSchedule::linear(T)
                                                             : DriveSchedule::smooth_sine(T);
        const DensityMatrix rho0{1.0, 0.0};
        const double closed = closed_rho_aa(p, s, T, rho0);
        MEOptions last;
        last.sample_stride = 1u << 22;
        const double ode = me_evolve(p, s, rho0, 40000, MEForm::scaled, last).final().rho_aa;
        CHECK(std::abs(closed - ode) < 1e-6);
    }
}

TEST_CASE("closed rho_aa with an initial coherence matches the scaled form") {
    const double T = 80.0;
    const ModelParams p = params(0.03, 0.02, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::smooth_sine(T);
    const DensityMatrix rho0{0.6, cx(0.3, -0.25)};
    const double closed = closed_rho_aa(p, s, T, rho0);
    MEOptions last;
    last.sample_stride = 1u << 22;
    const double ode = me_evolve(p, s, rho0, 40000, MEForm::scaled, last).final().rho_aa;
    CHECK(std::abs(closed - ode) < 1e-6);
}

TEST_CASE("closed rho_ab: zero field is a phase times the bare decay") {
    const double T = 60.0;
    const ModelParams p = params(0.02, 0.0, T, two_pi / T);
    const cx r(0.21, -0.34);
    const auto [pab, pba] = closed_rho_ab(p, DriveSchedule::linear(T), T, {0.5, r});
    const double Om = omega_plus(p);
    const cx expect = r * std::exp(cx(0.0, -2.0 * (Om + p.omega0()) * T)) * std::exp(-p.gamma * T);
    CHECK(std::abs(pab - expect) < 1e-12);
    CHECK(std::abs(pba - std::conj(expect)) < 1e-12);
}

TEST_CASE("closed rho_ab: maximally mixed initial state has no source") {
    const double T = 40.0;
    const ModelParams p = params(0.02, 0.1, T, two_pi / T);
    const auto [pab, pba] = closed_rho_ab(p, DriveSchedule::smooth_sine(T), T, {0.5, 0.0});
    CHECK(std::abs(pab) < 1e-12);
    CHECK(std::abs(pba) < 1e-12);
}

TEST_CASE("closed rho_ab deviation from the scaled form shrinks toward weak field") {
    // the SU(2)-split closed form is not the exact generator of the scaled
    // equations; the gap is measured and reported, never corrected
    const double T = 100.0;
    const DriveSchedule s = DriveSchedule::smooth_sine(T);
    const DensityMatrix rho0{0.8, cx(0.1, 0.05)};
    MEOptions last;
    last.sample_stride = 1u << 22;
    std::vector<double> gaps;
    for (double c : {0.01, 0.005, 0.0025}) {
        const ModelParams p = params(0.02, 2.0 * c, T, two_pi / T);
        const auto [pab, pba] = closed_rho_ab(p, s, T, rho0);
        (void)pba;
        const METrajectory ode = me_evolve(p, s, rho0, 40000, MEForm::scaled, last);
        gaps.push_back(std::abs(pab - ode.final().rho_ab));
    }
    MESSAGE("eq-(7) vs ODE coherence gaps at m E0/2 = {0.01, 0.005, 0.0025}: ", gaps[0], ", ",
            gaps[1], ", ", gaps[2]);
    CHECK(gaps[0] > gaps[1]);
    CHECK(gaps[1] > gaps[2]);
    CHECK(gaps[2] < 5e-3);
}

TEST_CASE("weak-field forms: zero field is exact") {
    const double T = 70.0;
    const ModelParams p = params(0.03, 0.0, T, two_pi / T);
    const DensityMatrix rho0{0.75, cx(0.2, 0.1)};
    const auto [paa, pab] = weakfield_closed(p, DriveSchedule::linear(T), T, rho0);
    const double Om = omega_plus(p);
    CHECK(paa == doctest::Approx(0.75 * std::exp(-2.0 * p.gamma * T)).epsilon(1e-12));
    const cx expect =
        rho0.rho_ab * std::exp(-(cx(0.0, 2.0 * (Om + p.omega0())) + p.gamma) * T);
    CHECK(std::abs(pab - expect) < 1e-12);
}

TEST_CASE("weak-field coherence source dies at rho_aa(0) = 1/2") {
    const double T = 30.0;
    const ModelParams p = params(0.02, 0.2, T, two_pi / T);
    const auto [paa, pab] = weakfield_closed(p, DriveSchedule::linear(T), T, {0.5, 0.0});
    (void)paa;
    CHECK(std::abs(pab) == 0.0);
}

TEST_CASE("weak-field deviation is second order in the drive amplitude") {
    const double T = 100.0, gamma = 0.02;
    const DriveSchedule s = DriveSchedule::linear(T);
    const DensityMatrix rho0{1.0, 0.0};
    MEOptions last;
    last.sample_stride = 1u << 22;
    std::vector<double> devs;
    for (double c : {0.004, 0.002, 0.001}) {
        const ModelParams p = params(gamma, 2.0 * c, T, two_pi / T);
        const double ode = me_evolve(p, s, rho0, 50000, MEForm::scaled, last).final().rho_aa;
        const auto [paa, pab] = weakfield_closed(p, s, T, rho0);
        (void)pab;
        devs.push_back(std::abs(ode - paa));
    }
    MESSAGE("me vs weak-field deviations: ", devs[0], ", ", devs[1], ", ", devs[2]);
    CHECK(devs[0] / devs[1] > 3.2);
    CHECK(devs[0] / devs[1] < 4.8);
    CHECK(devs[1] / devs[2] > 3.2);
    CHECK(devs[1] / devs[2] < 4.8);
}

TEST_CASE("weak-field solution tracks the reduced form pointwise at the example settings") {
    // deviation bounded by C E0^2 with C frozen from the measured constant
    const double T = 400.0, gamma = 0.02, c = 0.005;
    const ModelParams p = params(gamma, 2.0 * c, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::linear(T);
    const DensityMatrix rho0{1.0, 0.0};
    const METrajectory traj = me_evolve(p, s, rho0, 1u << 20, MEForm::reduced,
                                        MEOptions{.sample_stride = 1u << 16});
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const auto [paa, pab] = weakfield_closed(p, s, traj.t[k], rho0);
        (void)pab;
        worst = std::max(worst, std::abs(paa - traj.states[k].rho_aa));
    }
    MESSAGE("pointwise |reduced - weakfield| at m E0/2 = 0.005: ", worst);
    // measured 0.2438 at E0 = 0.01, i.e. C ~ 2440; assert with headroom
    CHECK(worst < std::max(1e-5, 2800.0 * p.E0 * p.E0));
}
