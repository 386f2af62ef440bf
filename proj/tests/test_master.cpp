#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

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

DensityMatrix random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double paa = u(rng);
    const double rmax = std::sqrt(paa * (1.0 - paa));
    const double r = rmax * u(rng), th = two_pi * u(rng);
    return {paa, cx(r * std::cos(th), r * std::sin(th))};
}

} // namespace

TEST_CASE("ground state is stationary under pure decay") {
    const ModelParams p = params(0.05, 0.0, 10.0, 0.0);
    const DriveSchedule s = DriveSchedule::linear(10.0);
    const DensityMatrix ground{0.0, 0.0};
    const QuadratureState q{};
    const ComplexMatrix2 d = me_rhs_full(p, s, 3.0, ground, ground, q);
    CHECK(max_abs(d) < 1e-15);
}

TEST_CASE("dissipator empties the excited state at rate 2 gamma") {
    const ModelParams p = params(0.05, 0.0, 10.0, 0.0);
    const DriveSchedule s = DriveSchedule::linear(10.0);
    const DensityMatrix excited{1.0, 0.0};
    const ComplexMatrix2 d = me_rhs_full(p, s, 0.0, excited, excited, QuadratureState{});
    CHECK(d.a.real() == doctest::Approx(-2.0 * p.gamma).epsilon(1e-14));
    CHECK(d.d.real() == doctest::Approx(2.0 * p.gamma).epsilon(1e-14));
}

TEST_CASE("full generator output is hermitian and traceless on random states") {
    const double T = 60.0;
    const ModelParams p = params(0.03, 0.2, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::smooth_sine(T);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double t = T * u(rng);
        const DensityMatrix rho = random_state(rng);
        const DensityMatrix rho0 = random_state(rng);
        const QuadratureState q = quadratures_to(p, s, t);
        const ComplexMatrix2 d = me_rhs_full(p, s, t, rho, rho0, q);
        CHECK(std::abs(d.trace()) < 1e-14);
        CHECK(max_abs(d - d.adjoint()) < 1e-14);
    }
}

TEST_CASE("reduced equations without a field are plain decay") {
    const ModelParams p = params(0.04, 0.0, 10.0, 0.0);
    const DriveSchedule s = DriveSchedule::linear(10.0);
    const DensityMatrix rho{0.7, cx(0.2, -0.1)};
    const auto [dpaa, dpab] = me_rhs_reduced(p, s, 2.0, rho, rho, QuadratureState{});
    CHECK(dpaa == doctest::Approx(-2.0 * p.gamma * 0.7).epsilon(1e-14));
    const cx expect = (cx(0.0, -2.0 * (p.omega0() + omega_plus(p))) - p.gamma) * rho.rho_ab;
    CHECK(std::abs(dpab - expect) < 1e-15);
}

TEST_CASE("empty quadrature at t = 0 leaves only the initial-coherence drive term") {
    const ModelParams p = params(0.0, 0.3, 10.0, 0.0);
    const DriveSchedule s = DriveSchedule::linear(10.0);
    const DensityMatrix rho{0.6, cx(0.15, 0.25)};
    const auto [dpaa, dpab] = me_rhs_reduced(p, s, 0.0, rho, rho, QuadratureState{});
    (void)dpab;
    const double f0 = field_projection(p, s, 0.0);
    CHECK(dpaa == doctest::Approx(2.0 * f0 * rho.rho_ab.imag()).epsilon(1e-14));
}

TEST_CASE("reduced equations equal the (aa, ab) entries of the full generator") {
    const double T = 45.0;
    const ModelParams p = params(0.02, 0.25, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::linear(T);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = T * u(rng);
        const DensityMatrix rho = random_state(rng);
        const DensityMatrix rho0 = random_state(rng);
        const QuadratureState q = quadratures_to(p, s, t);
        const ComplexMatrix2 full = me_rhs_full(p, s, t, rho, rho0, q);
        const auto [dpaa, dpab] = me_rhs_reduced(p, s, t, rho, rho0, q);
        worst = std::max({worst, std::abs(full.a.real() - dpaa), std::abs(full.b - dpab)});
    }
    MESSAGE("max |full - reduced| over 100 random states: ", worst);
    CHECK(worst < 1e-9);
}

TEST_CASE("zero-field decay hits e^{-5} in every form") {
    const ModelParams p = params(0.05, 0.0, 50.0, two_pi / 50.0);
    const DriveSchedule s = DriveSchedule::linear(50.0);
    const DensityMatrix rho0{1.0, 0.0};
    MEOptions last;
    last.sample_stride = 1u << 20;
    for (MEForm form : {MEForm::full, MEForm::reduced, MEForm::scaled}) {
        const METrajectory traj = me_evolve(p, s, rho0, 20000, form, last);
        CHECK(std::abs(traj.final().rho_aa - std::exp(-5.0)) < 1e-9);
    }
}

TEST_CASE("populations are frozen without decay or drive") {
    const ModelParams p = params(0.0, 0.0, 30.0, two_pi / 30.0);
    const DriveSchedule s = DriveSchedule::linear(30.0);
    const METrajectory traj = me_evolve(p, s, {0.4, cx(0.2, 0.1)}, 2000, MEForm::reduced,
                                        MEOptions{.sample_stride = 100});
    for (const auto& st : traj.states) CHECK(st.rho_aa == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("reduced and scaled forms agree at weak field and large T") {
    // at m E0/2 = 0.01 the genuine counter-rotating gap measures ~3e-3;
    // the 1e-4 agreement holds one field decade lower
    const double T = 200.0, gamma = 0.02;
    const DriveSchedule s = DriveSchedule::linear(T);
    const DensityMatrix rho0{1.0, 0.0};
    MEOptions last;
    last.sample_stride = 1u << 22;

    const ModelParams p1 = params(gamma, 0.02, T, two_pi / T);  // m E0/2 = 0.01
    const double r1 =
        me_evolve(p1, s, rho0, 600000, MEForm::reduced, last).final().rho_aa;
    const double v1 = me_evolve(p1, s, rho0, 20000, MEForm::scaled, last).final().rho_aa;
    MESSAGE("reduced vs scaled gap at m E0/2 = 0.01: ", std::abs(r1 - v1));
    CHECK(std::abs(r1 - v1) < 5e-3);

    const ModelParams p2 = params(gamma, 0.002, T, two_pi / T);  // m E0/2 = 0.001
    const double r2 =
        me_evolve(p2, s, rho0, 600000, MEForm::reduced, last).final().rho_aa;
    const double v2 = me_evolve(p2, s, rho0, 20000, MEForm::scaled, last).final().rho_aa;
    CHECK(std::abs(r2 - v2) < 1e-4);
}

TEST_CASE("doubling the step count moves rho_aa(T) by less than 1e-8") {
    const double T = 50.0;
    const ModelParams p = params(0.05, 0.1, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::linear(T);
    MEOptions last;
    last.sample_stride = 1u << 22;
    for (MEForm form : {MEForm::reduced, MEForm::scaled}) {
        const double a = me_evolve(p, s, {1.0, 0.0}, 40000, form, last).final().rho_aa;
        const double b = me_evolve(p, s, {1.0, 0.0}, 80000, form, last).final().rho_aa;
        CHECK(std::abs(a - b) < 1e-8);
    }
}

TEST_CASE("trace and hermiticity hold at every sample of every form") {
    const double T = 40.0;
    const ModelParams p = params(0.03, 0.3, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::smooth_sine(T);
    for (MEForm form : {MEForm::full, MEForm::reduced, MEForm::scaled}) {
        const METrajectory traj = me_evolve(p, s, {0.8, cx(0.1, -0.2)}, 20000, form,
                                            MEOptions{.sample_stride = 500});
        for (const auto& st : traj.states) {
            const ComplexMatrix2 m = st.matrix();
            CHECK(std::abs(m.trace() - cx(1.0)) == 0.0);
            CHECK(max_abs(m - m.adjoint()) == 0.0);
        }
    }
}

TEST_CASE("carried quadratures match the standalone quadrature rule") {
    const double T = 40.0;
    const ModelParams p = params(0.02, 0.2, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::linear(T);
    const METrajectory traj = me_evolve(p, s, {1.0, 0.0}, 40000, MEForm::reduced,
                                        MEOptions{.sample_stride = 8000});
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const QuadratureState ref = quadratures_to(p, s, traj.t[k]);
        const QuadratureState& got = traj.quadratures[k];
        CHECK(std::abs(got.G - ref.G) < 1e-8);
        CHECK(std::abs(got.Gt - ref.Gt) < 1e-8);
        CHECK(std::abs(got.A - ref.A) < 1e-8);
        CHECK(std::abs(got.B - ref.B) < 1e-8);
    }
}

TEST_CASE("scaled form carries the resonant quadrature only") {
    const double T = 60.0;
    const ModelParams p = params(0.02, 0.1, T, two_pi / T);
    const DriveSchedule s = DriveSchedule::linear(T);
    const METrajectory traj = me_evolve(p, s, {1.0, 0.0}, 4000, MEForm::scaled,
                                        MEOptions{.sample_stride = 800});
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const QuadratureState ref = quadratures_to(p, s, traj.t[k]);
        CHECK(std::abs(traj.quadratures[k].Gt - ref.Gt) < 1e-8);
    }
}

TEST_CASE("me_evolve rejects an insufficient step budget") {
    const ModelParams p = params(0.05, 0.1, 500.0, two_pi / 500.0);
    CHECK_THROWS_WITH_AS(
        me_evolve(p, DriveSchedule::linear(500.0), {1.0, 0.0}, 1200, MEForm::reduced),
        doctest::Contains("step budget"), ValidationError);
}

TEST_CASE("scaled form notes leaving the resonance region") {
    const double T = 50.0;
    const ModelParams p = params(0.02, 0.01, T, 30.0 * M_PI / T);
    const METrajectory traj = me_evolve(p, DriveSchedule::linear(T), {1.0, 0.0}, 4000,
                                        MEForm::scaled, MEOptions{.sample_stride = 1u << 20});
    REQUIRE(traj.notes.size() == 1);
    CHECK(traj.notes[0].find("resonance region") != std::string::npos);
}

TEST_CASE("weak-field log-magnitude doubles with the period") {
    // the imaginary phase is time-dependent: log rho_aa(T)/rho_aa(0) at T and
    // 2T has ratio 2 within 1%
    const double Tref = 400.0 * M_PI, Delta = two_pi / Tref;
    MEOptions last;
    last.sample_stride = 1u << 22;
    auto log_ratio = [&](double T) {
        ModelParams p = params(0.002, 4e-6, T, Delta);  // m E0/2 = 2e-6
        const DriveSchedule s = DriveSchedule::linear(T);
        const std::size_t steps = static_cast<std::size_t>(600.0 * T);
        return std::log(me_evolve(p, s, {1.0, 0.0}, steps, MEForm::reduced, last).final().rho_aa);
    };
    const double y1 = log_ratio(200.0 * M_PI);
    const double y2 = log_ratio(400.0 * M_PI);
    CHECK(y2 / y1 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("physicality monitor stays quiet on well-behaved runs") {
    const double T = 30.0;
    const ModelParams p = params(0.05, 0.2, T, two_pi / T);
    const METrajectory traj = me_evolve(p, DriveSchedule::linear(T), {1.0, 0.0}, 20000,
                                        MEForm::reduced, MEOptions{.sample_stride = 100});
    CHECK(traj.warning_count == 0);
}
