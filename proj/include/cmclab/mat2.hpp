#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace cmclab {

using cplx = std::complex<double>;

/// 2x2 complex matrix, the carrier for frames, connection coefficients and
/// Hermitian points. Plain value type; rows are (a11 a12), (a21 a22).
struct Mat2 {
    cplx a11{}, a12{}, a21{}, a22{};

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator-() const { return {-a11, -a12, -a21, -a22}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator*(cplx s) const { return {s * a11, s * a12, s * a21, s * a22}; }
    Mat2& operator+=(const Mat2& o) { return *this = *this + o; }
    Mat2& operator-=(const Mat2& o) { return *this = *this - o; }

    cplx trace() const { return a11 + a22; }
    cplx det() const { return a11 * a22 - a12 * a21; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 conj() const {
        return {std::conj(a11), std::conj(a12), std::conj(a21), std::conj(a22)};
    }
    /// Conjugate transpose (the * of frame theory).
    Mat2 adjoint() const {
        return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)};
    }
    /// Inverse assuming det == 1 (adjugate). Caller guarantees unimodularity.
    Mat2 inverse_unimodular() const { return {a22, -a12, -a21, a11}; }

    double frobenius_norm() const {
        return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) +
                         std::norm(a22));
    }
};

inline Mat2 operator*(cplx s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * cplx(s); }

// Named constant matrices of the frame formalism.
inline Mat2 e12() { return {0.0, 1.0, 0.0, 0.0}; }
inline Mat2 e21() { return {0.0, 0.0, 1.0, 0.0}; }
inline Mat2 sigma1() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 sigma2() { return {0.0, cplx(0, 1), cplx(0, -1), 0.0}; }
inline Mat2 sigma3() { return {1.0, 0.0, 0.0, -1.0}; }

/// Antidiagonal phase-collecting conjugator i*[[0, e^{i t/2}],[e^{-i t/2}, 0]],
/// t the phase angle in radians. Unimodular and unitary.
inline Mat2 phase_swap(double t) {
    const cplx i(0, 1);
    return {0.0, i * std::exp(cplx(0, t / 2.0)), i * std::exp(cplx(0, -t / 2.0)),
            0.0};
}

/// diag(e^{-i pi/4}, e^{i pi/4}).
inline Mat2 quarter_rotation() {
    return {std::exp(cplx(0, -M_PI / 4)), 0.0, 0.0, std::exp(cplx(0, M_PI / 4))};
}

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

inline bool is_unimodular(const Mat2& m, double tol = 1e-10) {
    return std::abs(m.det() - 1.0) <= tol;
}

inline void require_unimodular(const Mat2& m, double tol, const char* what) {
    if (!is_unimodular(m, tol))
        throw std::invalid_argument(std::string(what) + ": |det - 1| = " +
                                    std::to_string(std::abs(m.det() - 1.0)) +
                                    " exceeds tolerance");
}

inline bool is_special_unitary(const Mat2& m, double tol = 1e-10) {
    const Mat2 g = m * m.adjoint() - Mat2::identity();
    return g.frobenius_norm() <= tol && is_unimodular(m, tol);
}

/// Exponential of a traceless 2x2 matrix in closed form:
///   exp X = cosh(s) I + sinh(s)/s X,  s^2 = tr(X^2)/2.
/// s is complex in general; both square-root branches give the same value
/// since cosh and sinh(s)/s are even, so the principal branch is used.
/// Near s = 0 the even Taylor series in s^2 keeps full accuracy.
inline Mat2 exp_traceless(const Mat2& x, double trace_tol = 1e-12) {
    if (std::abs(x.trace()) > trace_tol)
        throw std::invalid_argument("exp_traceless: input is not traceless");
    const cplx s2 = 0.5 * (x * x).trace();
    const cplx s = std::sqrt(s2);
    cplx ch, shc;  // cosh(s), sinh(s)/s
    if (std::abs(s) < 1e-6) {
        ch = 1.0 + s2 * (0.5 + s2 / 24.0);
        shc = 1.0 + s2 * (1.0 / 6.0 + s2 / 120.0);
    } else {
        ch = std::cosh(s);
        shc = std::sinh(s) / s;
    }
    Mat2 r = x * shc;
    r.a11 += ch;
    r.a22 += ch;
    return r;
}

/// Rescale a near-unimodular frame back onto det = 1, dividing by the
/// principal square root of det S. Requires Re(det S) > 0; a nonpositive
/// real part means the integration has left the renormalizable neighborhood.
inline Mat2 renormalize_det(const Mat2& s) {
    const cplx d = s.det();
    if (!(d.real() > 0.0))
        throw std::runtime_error(
            "renormalize_det: Re(det) <= 0, frame too far from SL(2,C)");
    return s * (1.0 / std::sqrt(d));
}

}  // namespace cmclab
