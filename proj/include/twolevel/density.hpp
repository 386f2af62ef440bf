#pragma once

#include <cmath>
#include <complex>

#include "twolevel/matrix2.hpp"

namespace twolevel {

// Reduced state of the atom. Trace one and hermiticity hold by construction:
// only rho_aa and rho_ab are stored, rho_bb = 1 - rho_aa, rho_ba = conj(rho_ab).
struct DensityMatrix {
    double rho_aa = 1.0;
    cx rho_ab{};

    double rho_bb() const { return 1.0 - rho_aa; }
    cx rho_ba() const { return std::conj(rho_ab); }

    ComplexMatrix2 matrix() const { return {rho_aa, rho_ab, rho_ba(), rho_bb()}; }

    // Eigenvalues are 1/2 +- sqrt((rho_aa - 1/2)^2 + |rho_ab|^2).
    double eig_min() const {
        const double h = rho_aa - 0.5;
        return 0.5 - std::sqrt(h * h + std::norm(rho_ab));
    }
    double eig_max() const {
        const double h = rho_aa - 0.5;
        return 0.5 + std::sqrt(h * h + std::norm(rho_ab));
    }

    // How far outside [ -tol, 1+tol ] the spectrum sits; 0 when physical.
    double physicality_excess(double tol = 1e-6) const {
        const double lo = eig_min(), hi = eig_max();
        double ex = 0.0;
        if (lo < -tol) ex = std::max(ex, -tol - lo);
        if (hi > 1.0 + tol) ex = std::max(ex, hi - 1.0 - tol);
        return ex;
    }
};

// Amplitudes of the non-hermitian (Bethe-Lamb) track.
struct AmplitudePair {
    cx ca{}, cb{};

    double norm2() const { return std::norm(ca) + std::norm(cb); }
};

} // namespace twolevel
