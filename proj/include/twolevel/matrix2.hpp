#pragma once

#include <cmath>
#include <complex>

#include "twolevel/errors.hpp"

namespace twolevel {

using cx = std::complex<double>;

// 2x2 complex matrix, row-major (a b; c d). Value type shared by the
// propagator machinery and the master-equation generator.
struct ComplexMatrix2 {
    cx a{}, b{}, c{}, d{};

    static ComplexMatrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static ComplexMatrix2 zero() { return {}; }

    cx trace() const { return a + d; }

    ComplexMatrix2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }

    friend ComplexMatrix2 operator+(const ComplexMatrix2& m, const ComplexMatrix2& n) {
        return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
    }
    friend ComplexMatrix2 operator-(const ComplexMatrix2& m, const ComplexMatrix2& n) {
        return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
    }
    friend ComplexMatrix2 operator*(const ComplexMatrix2& m, const ComplexMatrix2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend ComplexMatrix2 operator*(cx s, const ComplexMatrix2& m) {
        return {s * m.a, s * m.b, s * m.c, s * m.d};
    }
    friend ComplexMatrix2 operator*(const ComplexMatrix2& m, cx s) { return s * m; }
};

inline double max_abs(const ComplexMatrix2& m) {
    return std::max(std::max(std::abs(m.a), std::abs(m.b)),
                    std::max(std::abs(m.c), std::abs(m.d)));
}

inline bool all_finite(const ComplexMatrix2& m) {
    auto ok = [](cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(m.a) && ok(m.b) && ok(m.c) && ok(m.d);
}

// Pauli matrices in the (|a>, |b>) basis, |a> the upper level.
inline ComplexMatrix2 sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline ComplexMatrix2 sigma_y() { return {0.0, cx(0, -1), cx(0, 1), 0.0}; }
inline ComplexMatrix2 sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }
inline ComplexMatrix2 sigma_plus() { return {0.0, 1.0, 0.0, 0.0}; }   // |a><b|
inline ComplexMatrix2 sigma_minus() { return {0.0, 0.0, 1.0, 0.0}; }  // |b><a|

inline ComplexMatrix2 commutator(const ComplexMatrix2& m, const ComplexMatrix2& n) {
    return m * n - n * m;
}
inline ComplexMatrix2 anticommutator(const ComplexMatrix2& m, const ComplexMatrix2& n) {
    return m * n + n * m;
}

// Exact exponential through the trace/deviator split: for traceless N,
// N^2 = (N11^2 + N12 N21) I, so exp(M) = e^q (cosh r I + sinh(r)/r N).
// A short series takes over near r = 0 where sinh(r)/r loses digits.
inline ComplexMatrix2 expm2(const ComplexMatrix2& m) {
    if (!all_finite(m)) throw ValidationError("expm2: non-finite matrix entry");
    const cx q = 0.5 * m.trace();
    ComplexMatrix2 n = m;
    n.a -= q;
    n.d -= q;
    const cx r2 = n.a * n.a + n.b * n.c;
    const cx r = std::sqrt(r2);
    cx ch, shr;
    if (std::abs(r) < 1e-4) {
        ch = 1.0 + r2 * (0.5 + r2 / 24.0);
        shr = 1.0 + r2 * (1.0 / 6.0 + r2 / 120.0);
    } else {
        ch = std::cosh(r);
        shr = std::sinh(r) / r;
    }
    const cx eq = std::exp(q);
    return {eq * (ch + shr * n.a), eq * shr * n.b,
            eq * shr * n.c, eq * (ch + shr * n.d)};
}

} // namespace twolevel
