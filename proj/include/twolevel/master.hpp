#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "twolevel/density.hpp"
#include "twolevel/matrix2.hpp"
#include "twolevel/params.hpp"
#include "twolevel/quadrature.hpp"
#include "twolevel/schedule.hpp"

namespace twolevel {

enum class MEForm { full, reduced, scaled };

MEForm me_form_from_name(const std::string& name);
std::string me_form_name(MEForm form);

struct PhysicalityWarning {
    double t = 0.0;
    double excess = 0.0;  // eigenvalue distance outside [-tol, 1+tol]
};

struct METrajectory {
    std::vector<double> t;
    std::vector<DensityMatrix> states;
    std::vector<QuadratureState> quadratures;
    std::size_t steps = 0;
    std::vector<PhysicalityWarning> warnings;  // capped; count keeps growing
    std::size_t warning_count = 0;
    std::vector<std::string> notes;

    const DensityMatrix& initial() const { return states.front(); }
    const DensityMatrix& final() const { return states.back(); }
};

// Full master generator: every term of the dissipative equation (the
// (omega0+Omega_+) sigma_z commutator, the sigma_x-Lambda0 drive commutator,
// the gamma dissipator, the A/B field-correlation terms). rho0 enters through
// Lambda0_ij(t) = e^{-i(E_i-E_j)t} rho_ij(0). Returns the full 2x2 derivative
// (hermitian, traceless).
ComplexMatrix2 me_rhs_full(const ModelParams& p, const DriveSchedule& s, double t,
                           const DensityMatrix& rho, const DensityMatrix& rho0,
                           const QuadratureState& q);

// Reduced pair of equations for (rho_aa, rho_ab); algebraically equal to the
// (aa, ab) entries of me_rhs_full when q carries the full quadrature G.
std::pair<double, cx> me_rhs_reduced(const ModelParams& p, const DriveSchedule& s, double t,
                                     const DensityMatrix& rho, const DensityMatrix& rho0,
                                     const QuadratureState& q);

std::size_t me_min_steps(const ModelParams& p, MEForm form);

struct MEOptions {
    std::size_t sample_stride = 1;
    double physicality_tol = 1e-6;
};

// Fixed-step RK4 with the quadratures advanced as auxiliary state on the same
// grid. The scaled form integrates the rescaled equations in s = t/T on [0,1]
// with counter-rotating terms dropped; it carries Gt only (its stored G/A/B
// are the resonant reconstruction, not the full integrals).
METrajectory me_evolve(const ModelParams& p, const DriveSchedule& s, const DensityMatrix& rho0,
                       std::size_t steps, MEForm form, const MEOptions& opts = {});

} // namespace twolevel
