#pragma once

#include <complex>
#include <cstddef>

#include "twolevel/matrix2.hpp"
#include "twolevel/params.hpp"
#include "twolevel/schedule.hpp"

namespace twolevel {

// Running values of the cumulative drive quadratures; all vanish at t = 0.
//   G  = int_0^t (mu.E)(t') e^{-i omega t'} dt'
//   Gt = (m E0/2) int_0^t e^{i(phi(t') - Delta t')} dt'   (resonant part of G)
//   A  = int_0^t (mu.E)(t') cos(omega (t-t')) dt'
//   B  = likewise with sine
struct QuadratureState {
    double t = 0.0;
    cx G{};
    cx Gt{};
    double A = 0.0;
    double B = 0.0;
};

// mu_ab . E_clas(t) = m E0 cos(nu t + phi(t))
double field_projection(const ModelParams& p, const DriveSchedule& s, double t);

// W(t) = e^{i(phi(t) - Delta t)}, the slowly varying phase near resonance.
cx resonant_phase(const ModelParams& p, const DriveSchedule& s, double t);

// Composite-Simpson quadrature with step halving until every component moves
// by < tol relative (or ConvergenceError at the interval cap).
QuadratureState quadratures_to(const ModelParams& p, const DriveSchedule& s, double t,
                               std::size_t max_intervals = std::size_t{1} << 22,
                               double tol = 1e-10);

} // namespace twolevel
