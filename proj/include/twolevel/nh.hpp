#pragma once

#include <cstddef>
#include <vector>

#include "twolevel/density.hpp"
#include "twolevel/params.hpp"
#include "twolevel/schedule.hpp"

namespace twolevel {

struct NHTrajectory {
    std::vector<double> t;
    std::vector<AmplitudePair> states;
    std::size_t steps = 0;
    // Largest single-step increase of |C_a|^2 + |C_b|^2 seen anywhere on the
    // grid (should stay at roundoff scale when gamma_a, gamma_b >= 0).
    double worst_norm_rise = 0.0;

    const AmplitudePair& initial() const { return states.front(); }
    const AmplitudePair& final() const { return states.back(); }
};

// Right-hand side of the Bethe-Lamb equation with V(t) = V0 e^{-i phi(t)}:
//   dCa/dt = -(gamma_a/2) Ca - i V0 e^{+i phi} e^{+i Delta t} Cb
//   dCb/dt = -(gamma_b/2) Cb - i V0 e^{-i phi} e^{-i Delta t} Ca
AmplitudePair nh_rhs(const NHParams& p, const DriveSchedule& s, double t,
                     const AmplitudePair& state);

// Smallest step count nh_evolve accepts for this period.
std::size_t nh_min_steps(const NHParams& p, double T);

// Classical fixed-step RK4 over [0, T]; sample_stride thins the stored grid
// (first and last states are always kept).
NHTrajectory nh_evolve(const NHParams& p, const DriveSchedule& s, const AmplitudePair& c0,
                       std::size_t steps, std::size_t sample_stride = 1);

struct GWPhase {
    cx theta0{};           // complex mixing angle
    cx beta_minus{};       // pi (1 - cos theta0)
    double geometric_decay = 1.0;  // e^{-2 Im beta_minus}
};

// Complex Berry phase of the cycle, principal branch Re sqrt >= 0 so that
// beta_minus -> 0 as Delta -> +inf. Schedule-free by construction.
GWPhase gw_phase(const NHParams& p);

// Same, but picks the square-root sign closer to sqrt_prev; use along
// parameter sweeps that cross the branch cut. sqrt_prev is updated.
GWPhase gw_phase_continuous(const NHParams& p, cx& sqrt_prev);

// Normalized eigenvector of the rotating-frame generator at t = 0 on the
// branch adiabatically connected to |a> (the one whose phase gw_phase gives).
AmplitudePair nh_adiabatic_initial_state(const NHParams& p);

struct SurvivalComponents {
    double dynamical = 0.0;  // 2 T Im(lambda_a), integrated along the cycle
    double geometric = 0.0;  // -2 Im beta_minus, T-independent
};

// Splits the adiabatic log-survival log(|C_a(T)|^2/|C_a(0)|^2) into its
// T-proportional and T-independent parts.
SurvivalComponents gw_survival_components(const NHParams& p, double T,
                                          std::size_t steps = 1024);

} // namespace twolevel
