#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cmclab/hyperbolic.hpp"
#include "cmclab/iwasawa.hpp"
#include "cmclab/magnus.hpp"
#include "cmclab/mat2.hpp"

namespace cmclab {

/// Immersion point f = S S*. Hermitian with <f,f> = -1 for unimodular S.
inline Mat2 immerse(const Mat2& s, double det_drift_tol = 1e-6) {
    require_unimodular(s, det_drift_tol, "immerse");
    return s * s.adjoint();
}

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Unit normal direction of the adjusted unitary frame: the Pauli coordinates
/// of -Phi sigma3 Phi* with Phi the unitary Iwasawa factor of S.
inline Vec3 gauss_map(const Mat2& s) {
    const Mat2 phi = iwasawa_split(s).phi.m;
    const Mat2 g = -(phi * sigma3() * phi.adjoint());
    return {g.a12.real(), g.a12.imag(), g.a11.real()};
}

/// Mean curvature encoded by the spectral parameter, H = (1-|l|^2)/(1+|l|^2).
inline double h_from_lambda(cplx lambda) {
    if (lambda == cplx(0.0)) throw std::invalid_argument("h_from_lambda: lambda = 0");
    const double m2 = std::norm(lambda);
    return (1.0 - m2) / (1.0 + m2);
}

/// Target-metric coefficient 4 / ((1+|zeta|^2)((1-|zeta|^2)+H(1+|zeta|^2))).
/// Defined inside the singular circle |zeta| = sqrt((1+H)/(1-H)) only.
inline double kokubu_metric(cplx zeta, double h) {
    if (!(h >= 0.0 && h < 1.0))
        throw std::domain_error("kokubu_metric: H outside [0, 1)");
    const double r2 = std::norm(zeta);
    const double factor = (1.0 - r2) + h * (1.0 + r2);
    if (factor < 1e-10)
        throw std::domain_error(
            "kokubu_metric: on or beyond the singular circle");
    return 4.0 / ((1.0 + r2) * factor);
}

struct SurfacePoint {
    Mat2 f;
    Su2 phi;
    Vec3 gauss;
    BallPoint ball;
};

inline SurfacePoint surface_point(const Mat2& s) {
    const auto iw = iwasawa_split(s);
    const Mat2 g = -(iw.phi.m * sigma3() * iw.phi.m.adjoint());
    const Mat2 f = s * s.adjoint();
    return {f, iw.phi, {g.a12.real(), g.a12.imag(), g.a11.real()}, to_ball(f)};
}

inline std::vector<SurfacePoint> surface_points(const FrameGrid& grid) {
    std::vector<SurfacePoint> pts;
    pts.reserve(grid.frames.size());
    for (const Mat2& s : grid.frames) pts.push_back(surface_point(s));
    return pts;
}

/// Geometry extracted from an integrated frame grid by central differences.
/// Border entries are NaN; fields are valid on interior nodes only.
struct ExtractedGeometry {
    int nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;
    std::vector<double> e2u;               // conformal factor e^{2u}
    std::vector<double> h_num;             // mean curvature
    std::vector<cplx> q_num;               // Hopf coefficient
    std::vector<double> conformal_defect;  // |<f_z,f_z>| / <f_z,f_zbar>

    int idx(int i, int j) const { return j * nx + i; }
    bool interior(int i, int j) const {
        return i > 0 && i < nx - 1 && j > 0 && j < ny - 1;
    }
};

namespace detail {

// Lorentz-orthogonal complement of span{a, b, c}: the Minkowski cross
// product via cofactor expansion, index raised with diag(-1,1,1,1). The
// result is a continuous field of the inputs, so its orientation does not
// jump between neighboring grid points.
inline Vec4 lorentz_normal(const Vec4& a, const Vec4& b, const Vec4& c) {
    auto minor3 = [&](int c0, int c1, int c2) {
        return a[c0] * (b[c1] * c[c2] - b[c2] * c[c1]) -
               a[c1] * (b[c0] * c[c2] - b[c2] * c[c0]) +
               a[c2] * (b[c0] * c[c1] - b[c1] * c[c0]);
    };
    const Vec4 w{minor3(1, 2, 3), -minor3(0, 2, 3), minor3(0, 1, 3),
                 -minor3(0, 1, 2)};
    return {-w[0], w[1], w[2], w[3]};
}

}  // namespace detail

/// Finite-difference extraction of (e^{2u}, H, Q) from the immersion f = SS*.
/// Conventions, consistent with the moving-frame coefficients:
///   <f_z, f_zbar> = e^{2u}/2,   H = 2 e^{-2u} <f_zzbar, n>,   Q = 4 <f_zz, n>,
/// with n the Lorentz-unit normal solving <n,f> = <n,f_x> = <n,f_y> = 0,
/// <n,n> = 1, oriented at the first interior node against S sigma3 S*.
inline ExtractedGeometry extract_geometry(const FrameGrid& grid,
                                          double degenerate_tol = 1e-12) {
    const GridSpec& g = grid.spec;
    if (g.nx < 5 || g.ny < 5)
        throw std::invalid_argument("extract_geometry: grid must be at least 5x5");
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<Vec4> f(size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            f[grid.idx(i, j)] = to_minkowski(immerse(grid.frame(i, j)));

    ExtractedGeometry out;
    out.nx = nx;
    out.ny = ny;
    out.hx = hx;
    out.hy = hy;
    out.e2u.assign(f.size(), nan);
    out.h_num.assign(f.size(), nan);
    out.q_num.assign(f.size(), cplx(nan, nan));
    out.conformal_defect.assign(f.size(), nan);

    double orient = 0.0;  // global sign for the normal field, fixed once

    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
            const int k = grid.idx(i, j);
            const Vec4 &fc = f[k], &fe = f[k + 1], &fw = f[k - 1];
            const Vec4 &fn = f[k + nx], &fs = f[k - nx];
            Vec4 fx, fy, fxx, fyy, fxy;
            for (int q = 0; q < 4; ++q) {
                fx[q] = (fe[q] - fw[q]) / (2 * hx);
                fy[q] = (fn[q] - fs[q]) / (2 * hy);
                fxx[q] = (fe[q] - 2 * fc[q] + fw[q]) / (hx * hx);
                fyy[q] = (fn[q] - 2 * fc[q] + fs[q]) / (hy * hy);
                fxy[q] = (f[k + nx + 1][q] - f[k + nx - 1][q] - f[k - nx + 1][q] +
                          f[k - nx - 1][q]) /
                         (4 * hx * hy);
            }
            const double bxx = minkowski_dot(fx, fx), byy = minkowski_dot(fy, fy);
            const double bxy = minkowski_dot(fx, fy);
            const double e2u = 0.5 * (bxx + byy);
            if (e2u < degenerate_tol)
                throw std::runtime_error("extract_geometry: degenerate metric");
            // <f_z,f_z> = ((bxx - byy) - 2i bxy)/4
            out.conformal_defect[k] =
                0.5 * std::hypot(bxx - byy, 2.0 * bxy) / e2u;

            Vec4 n = detail::lorentz_normal(fc, fx, fy);
            const double nn = minkowski_dot(n, n);
            if (!(nn > 0.0))
                throw std::runtime_error("extract_geometry: degenerate normal");
            const double inv = 1.0 / std::sqrt(nn);
            for (auto& v : n) v *= inv;
            if (orient == 0.0) {
                const Mat2 s = grid.frame(i, j);
                const Vec4 ref = to_minkowski(s * sigma3() * s.adjoint());
                orient = minkowski_dot(n, ref) >= 0.0 ? 1.0 : -1.0;
            }
            for (auto& v : n) v *= orient;

            Vec4 fzzb, re_fzz, im_fzz;
            for (int q = 0; q < 4; ++q) {
                fzzb[q] = 0.25 * (fxx[q] + fyy[q]);
                re_fzz[q] = 0.25 * (fxx[q] - fyy[q]);
                im_fzz[q] = -0.5 * fxy[q];
            }
            out.e2u[k] = e2u;
            out.h_num[k] = 2.0 / e2u * minkowski_dot(fzzb, n);
            out.q_num[k] = 4.0 * cplx(minkowski_dot(re_fzz, n),
                                      minkowski_dot(im_fzz, n));
        }
    return out;
}

}  // namespace cmclab
