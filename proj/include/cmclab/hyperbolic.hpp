#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "cmclab/mat2.hpp"

namespace cmclab {

/// Minkowski coordinates (x0, x1, x2, x3), signature (-,+,+,+).
using Vec4 = std::array<double, 4>;

/// Point of the unit ball model, |b| < 1.
struct BallPoint {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;

    double norm() const { return std::sqrt(b1 * b1 + b2 * b2 + b3 * b3); }
};

/// Complex-bilinear Minkowski pairing on 2x2 matrices,
///   <X,Y> = -1/2 tr(X sigma2 Y^t sigma2) = -1/2 tr(X adj(Y)).
/// Restricted to Hermitian matrices it is the real Lorentz product, and
/// <X,X> = -det X.
inline cplx lorentz_form(const Mat2& x, const Mat2& y) {
    return -0.5 *
           (x.a11 * y.a22 + x.a22 * y.a11 - x.a12 * y.a21 - x.a21 * y.a12);
}

inline bool is_hermitian(const Mat2& m, double tol = 1e-12) {
    return (m - m.adjoint()).frobenius_norm() <= tol;
}

/// Lorentz product of Hermitian matrices. Rejects non-Hermitian input.
inline double lorentz_inner(const Mat2& x, const Mat2& y, double herm_tol = 1e-12) {
    if (!is_hermitian(x, herm_tol) || !is_hermitian(y, herm_tol))
        throw std::invalid_argument("lorentz_inner: non-Hermitian input");
    return lorentz_form(x, y).real();
}

/// Dictionary (x0,x1,x2,x3) <-> [[x0+x3, x1+i x2],[x1-i x2, x0-x3]].
inline Vec4 to_minkowski(const Mat2& x) {
    return {0.5 * (x.a11.real() + x.a22.real()),
            x.a12.real(),
            x.a12.imag(),
            0.5 * (x.a11.real() - x.a22.real())};
}

inline Mat2 from_minkowski(const Vec4& v) {
    return {cplx(v[0] + v[3], 0.0), cplx(v[1], v[2]), cplx(v[1], -v[2]),
            cplx(v[0] - v[3], 0.0)};
}

inline double minkowski_dot(const Vec4& a, const Vec4& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Membership test for the hyperboloid model: Hermitian, <X,X> = -1 and
/// future-pointing (entry (1,1) positive).
inline bool on_hyperboloid(const Mat2& x, double tol = 1e-8) {
    if (!is_hermitian(x, 1e-10)) return false;
    if (!(x.a11.real() > 0.0)) return false;
    return std::abs(lorentz_form(x, x).real() + 1.0) <= tol;
}

/// Isometric action g.X = g X g*.
inline Mat2 act(const Mat2& g, const Mat2& x) { return g * x * g.adjoint(); }

/// Hyperboloid -> unit ball, b_i = x_i / (1 + x0).
inline BallPoint to_ball(const Mat2& x) {
    const Vec4 v = to_minkowski(x);
    if (!(v[0] > 0.0))
        throw std::domain_error("to_ball: point is not future-pointing (x0 <= 0)");
    const double s = 1.0 / (1.0 + v[0]);
    return {v[1] * s, v[2] * s, v[3] * s};
}

}  // namespace cmclab
