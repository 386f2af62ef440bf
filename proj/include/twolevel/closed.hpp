#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "twolevel/density.hpp"
#include "twolevel/matrix2.hpp"
#include "twolevel/params.hpp"
#include "twolevel/schedule.hpp"

namespace twolevel {

// Components of the SU(2) generator driving the coherence pair
// (rho_ab, rho_ba) in the rescaled solution:
//   Bx = d|Gt|^2/dt
//   By = 2 [Im Gt d(Re Gt)/dt - Re Gt d(Im Gt)/dt]
//   Bz = -2i [Omega_+ + d(Re Gt Im Gt)/dt]
struct BVector {
    cx x{}, y{}, z{};
};

ComplexMatrix2 bvector_dot_sigma(const BVector& b);

// B(t) from the running Gt and the analytic derivative dGt/dt = (m E0/2) W(t).
BVector bvector_at(const ModelParams& p, const DriveSchedule& s, double t, cx Gt,
                   double Omega_plus);

struct TimeOrderedResult {
    ComplexMatrix2 U;
    std::size_t intervals = 0;
    double last_delta = 0.0;
};

// Ordered product of expm2(B(t_k).sigma dt) over sub-intervals, midpoint
// sampling, halving the step until successive products differ by < tol in
// max-norm. Throws ConvergenceError at the cap.
TimeOrderedResult time_ordered_su2(const std::function<BVector(double)>& B, double t0, double t1,
                                   std::size_t initial_intervals = 64, double tol = 1e-9,
                                   std::size_t max_intervals = std::size_t{1} << 20);

struct ClosedOptions {
    std::size_t initial_intervals = 1024;
    double tol = 1e-9;
    std::size_t max_intervals = std::size_t{1} << 22;
};

// Population after one period from the rescaled solution: the bracketed
// initial-condition and integral terms times e^{-2(gamma T + |Gt(T)|^2)}.
// Trapezoidal cumulative grid, refined by global step halving.
double closed_rho_aa(const ModelParams& p, const DriveSchedule& s, double T,
                     const DensityMatrix& rho0, const ClosedOptions& opts = {});

// Coherence pair after one period via the time-ordered SU(2) propagator with
// the source column d1 = d2* = i (m E0/2)(1 - 2 rho_aa(0)) e^{-i(phi - Delta t)}.
// Returns (rho_ab(T), rho_ba(T)).
std::pair<cx, cx> closed_rho_ab(const ModelParams& p, const DriveSchedule& s, double T,
                                const DensityMatrix& rho0, const ClosedOptions& opts = {});

// Weak-field quadrature solutions for (rho_aa(t), rho_ab(t)); the caller is
// responsible for being in the m E0 << gamma, Delta regime.
std::pair<double, cx> weakfield_closed(const ModelParams& p, const DriveSchedule& s, double t,
                                       const DensityMatrix& rho0, const ClosedOptions& opts = {});

} // namespace twolevel
