#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmclab/mat2.hpp"

namespace cmclab {

/// Pointwise geometric data of a conformal immersion: metric exponent u with
/// its z-derivative, Hopf coefficient Q and mean curvature H in [0, 1).
/// u is real-valued, so the zbar-derivative is conj(u_z) by construction.
struct GeometricData {
    double u = 0.0;
    cplx u_z{};
    cplx Q{};
    double H = 0.0;

    cplx u_zbar() const { return std::conj(u_z); }

    void validate() const {
        if (!(H >= 0.0 && H < 1.0))
            throw std::invalid_argument("GeometricData: H outside [0, 1)");
    }
};

/// Spectral parameter lambda != 0 with its polar pieces.
struct SpectralParam {
    cplx lambda{1.0, 0.0};

    explicit SpectralParam(cplx l) : lambda(l) {
        if (lambda == cplx(0.0)) throw std::invalid_argument("SpectralParam: lambda = 0");
    }
    double modulus() const { return std::abs(lambda); }
    double phase() const { return std::arg(lambda); }
    bool cmc_interpretable() const { return modulus() <= 1.0; }
};

/// Moving-frame coefficients of F^{-1} dF = A dz + B dzbar:
///   A = [[u_z/2,        e^u (1+H)/2],      B = [[-u_zbar/2,    e^{-u} conj(Q)/4],
///        [-e^{-u} Q/4,  -u_z/2      ]]          [ e^u (1-H)/2,  u_zbar/2        ]]
inline std::pair<Mat2, Mat2> build_lax_pair(const GeometricData& g) {
    g.validate();
    const double eu = std::exp(g.u), emu = std::exp(-g.u);
    const Mat2 a{0.5 * g.u_z, 0.5 * eu * (1.0 + g.H), -0.25 * emu * g.Q,
                 -0.5 * g.u_z};
    const Mat2 b{-0.5 * g.u_zbar(), 0.25 * emu * std::conj(g.Q),
                 0.5 * eu * (1.0 - g.H), 0.5 * g.u_zbar()};
    return {a, b};
}

/// Geometric data sampled on a uniform rectangular grid with spacing h in
/// both directions; z(i,j) = (x0 + i h) + i (y0 + j h). Row-major storage.
struct GeometricField {
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, h = 0.0;
    std::vector<double> u;
    std::vector<cplx> u_z;
    std::vector<cplx> Q;
    std::vector<double> H;

    int idx(int i, int j) const { return j * nx + i; }
    cplx z(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
    GeometricData at(int i, int j) const {
        const int k = idx(i, j);
        return {u[k], u_z[k], Q[k], H[k]};
    }

    static GeometricField sample(int nx, int ny, double x0, double y0, double h,
                                 const std::function<double(cplx)>& fu,
                                 const std::function<cplx(cplx)>& fu_z,
                                 const std::function<cplx(cplx)>& fQ,
                                 const std::function<double(cplx)>& fH) {
        GeometricField f;
        f.nx = nx;
        f.ny = ny;
        f.x0 = x0;
        f.y0 = y0;
        f.h = h;
        f.u.resize(size_t(nx) * ny);
        f.u_z.resize(size_t(nx) * ny);
        f.Q.resize(size_t(nx) * ny);
        f.H.resize(size_t(nx) * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const cplx z = f.z(i, j);
                const int k = f.idx(i, j);
                f.u[k] = fu(z);
                f.u_z[k] = fu_z(z);
                f.Q[k] = fQ(z);
                f.H[k] = fH(z);
            }
        return f;
    }
};

/// Residual fields on the interior of the grid (border entries are NaN):
///  - gauss:    u_{z zbar} - e^{2u}(1-H^2)/4 - e^{-2u}|Q|^2/16  (real part)
///  - codazzi:  Q_zbar - 2 e^{2u} H_z
///  - flatness: A_zbar - B_z - [A, B]
/// identity_gap is the max interior deviation between the matrix residual and
/// the scalar expressions placed at their entries:
///   (1,1) = gauss, (2,1) = -(e^{-u}/4) codazzi, (1,2) = -(e^{-u}/4) conj(codazzi).
struct GaussCodazziResult {
    int nx = 0, ny = 0;
    std::vector<double> gauss;
    std::vector<cplx> codazzi;
    std::vector<Mat2> flatness;
    double identity_gap = 0.0;

    int idx(int i, int j) const { return j * nx + i; }
    bool interior(int i, int j) const {
        return i > 0 && i < nx - 1 && j > 0 && j < ny - 1;
    }
};

namespace detail {

// Central differences on grid fields: d/dz = (d/dx - i d/dy)/2.
template <typename T>
inline cplx fd_z(const std::vector<T>& f, int nx, int i, int j, double h) {
    const cplx fx = (cplx(f[j * nx + i + 1]) - cplx(f[j * nx + i - 1])) / (2.0 * h);
    const cplx fy = (cplx(f[(j + 1) * nx + i]) - cplx(f[(j - 1) * nx + i])) / (2.0 * h);
    return 0.5 * (fx - cplx(0, 1) * fy);
}

template <typename T>
inline cplx fd_zbar(const std::vector<T>& f, int nx, int i, int j, double h) {
    const cplx fx = (cplx(f[j * nx + i + 1]) - cplx(f[j * nx + i - 1])) / (2.0 * h);
    const cplx fy = (cplx(f[(j + 1) * nx + i]) - cplx(f[(j - 1) * nx + i])) / (2.0 * h);
    return 0.5 * (fx + cplx(0, 1) * fy);
}

inline Mat2 fd_mat(const std::vector<Mat2>& f, int nx, int i, int j, double h,
                   bool zbar) {
    const Mat2 fx = (f[j * nx + i + 1] - f[j * nx + i - 1]) * (1.0 / (2.0 * h));
    const Mat2 fy = (f[(j + 1) * nx + i] - f[(j - 1) * nx + i]) * (1.0 / (2.0 * h));
    const cplx iy = zbar ? cplx(0, 1) : cplx(0, -1);
    return (fx + iy * fy) * 0.5;
}

}  // namespace detail

/// Evaluate the Gauss--Codazzi residuals and the matrix flatness residual of
/// arbitrary sampled data (not necessarily a solution) and measure how well
/// the two agree. The agreement is an algebraic identity up to the O(h^2)
/// truncation of the central differences.
inline GaussCodazziResult gauss_codazzi_residual(const GeometricField& f) {
    if (f.nx < 5 || f.ny < 5)
        throw std::invalid_argument("gauss_codazzi_residual: grid must be at least 5x5");
    const int nx = f.nx, ny = f.ny;
    const double nan = std::nan("");

    std::vector<Mat2> a(size_t(nx) * ny), b(size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            auto [ai, bi] = build_lax_pair(f.at(i, j));
            a[f.idx(i, j)] = ai;
            b[f.idx(i, j)] = bi;
        }

    GaussCodazziResult r;
    r.nx = nx;
    r.ny = ny;
    r.gauss.assign(size_t(nx) * ny, nan);
    r.codazzi.assign(size_t(nx) * ny, cplx(nan, nan));
    r.flatness.assign(size_t(nx) * ny, Mat2::zero());
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
            const int k = f.idx(i, j);
            const double eu = std::exp(f.u[k]), e2u = eu * eu;

            const cplx u_zzbar = detail::fd_zbar(f.u_z, nx, i, j, f.h);
            const double gauss = u_zzbar.real() -
                                 0.25 * e2u * (1.0 - f.H[k] * f.H[k]) -
                                 std::norm(f.Q[k]) / (16.0 * e2u);
            const cplx codazzi = detail::fd_zbar(f.Q, nx, i, j, f.h) -
                                 2.0 * e2u * detail::fd_z(f.H, nx, i, j, f.h);
            const Mat2 flat = detail::fd_mat(a, nx, i, j, f.h, /*zbar=*/true) -
                              detail::fd_mat(b, nx, i, j, f.h, /*zbar=*/false) -
                              commutator(a[k], b[k]);
            r.gauss[k] = gauss;
            r.codazzi[k] = codazzi;
            r.flatness[k] = flat;

            const cplx scale = -0.25 / eu;
            const Mat2 from_scalars{cplx(gauss), scale * std::conj(codazzi),
                                    scale * codazzi, cplx(-gauss)};
            const double gap = (flat - from_scalars).frobenius_norm();
            if (gap > r.identity_gap) r.identity_gap = gap;
        }
    return r;
}

/// Balanced spectral modulus s = sqrt((1-H)/(1+H)), in (0, 1] for H in [0, 1).
inline double balanced_modulus(double h) {
    if (!(h >= 0.0 && h < 1.0))
        throw std::domain_error("balanced_modulus: H outside [0, 1)");
    return std::sqrt((1.0 - h) / (1.0 + h));
}

/// Spectral deformation followed by the constant conjugations that collect
/// the phase into the off-diagonal entries:
///   A12 -> s A12, B21 -> B21/s, A21 -> t^{-2} A21, B12 -> t^2 B12
/// (t = e^{i theta}), then X -> M X M^{-1} with M = quarter_rotation * phase_swap.
/// With s = balanced_modulus(H), the transported frame entries -- (2,1) of the
/// new A and (1,2) of the new B -- both have magnitude e^u sqrt(1-H^2)/2.
inline std::pair<Mat2, Mat2> balance_gauge(const Mat2& a, const Mat2& b, double s,
                                           double theta) {
    if (!(s > 0.0)) throw std::invalid_argument("balance_gauge: s must be positive");
    const cplx t = std::exp(cplx(0, theta));
    const cplx t2 = t * t;
    const Mat2 a1{a.a11, s * a.a12, a.a21 / t2, a.a22};
    const Mat2 b1{b.a11, t2 * b.a12, b.a21 / s, b.a22};
    const Mat2 m = quarter_rotation() * phase_swap(theta);
    const Mat2 minv = m.inverse_unimodular();
    return {m * a1 * minv, m * b1 * minv};
}

}  // namespace cmclab
