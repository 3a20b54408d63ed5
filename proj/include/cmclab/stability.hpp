#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cmclab/mat2.hpp"

namespace cmclab {

/// Zeroth-order coefficient of the Jacobi operator,
///   J phi = -Lap phi - (2H^2 - e^{-4u}|Q|^2/2 - 2) phi.
inline double jacobi_potential(double u, cplx q, double h) {
    return 2.0 * h * h - 0.5 * std::exp(-4.0 * u) * std::norm(q) - 2.0;
}

/// Fourier-mode potential on a rotationally symmetric profile (s = log r):
///   V_m(s) = e^{2u(s)} (2H^2 - e^{-4u(s)}|Q(s)|^2/2 - 2) - m^2.
inline std::function<double(double)> fourier_potential(
    std::function<double(double)> u_profile,
    std::function<cplx(double)> q_profile, double h, int m) {
    return [u = std::move(u_profile), q = std::move(q_profile), h, m](double s) {
        const double us = u(s);
        return std::exp(2.0 * us) * jacobi_potential(us, q(s), h) - double(m) * m;
    };
}

/// Normalization constant of the Hopf coefficient in the adjusted-Gauss-map
/// variables, C_H = 2(1+H) - sqrt(1-H^2).
inline double c_h(double h) {
    if (!(h >= 0.0 && h < 1.0))
        throw std::domain_error("c_h: H outside [0, 1)");
    return 2.0 * (1.0 + h) - std::sqrt(1.0 - h * h);
}

/// Jacobi coefficient written in the Gauss-map variables:
///   2H^2 - 2 - (1/2) C_H^2 / (1+|nu|^2)^2.
inline double aa_jacobi_potential(double nu_abs, double h) {
    if (!(nu_abs >= 0.0))
        throw std::domain_error("aa_jacobi_potential: |nu| must be >= 0");
    const double ch = c_h(h);
    const double d = 1.0 + nu_abs * nu_abs;
    return 2.0 * h * h - 2.0 - 0.5 * ch * ch / (d * d);
}

/// Dirichlet spectrum summary of -d^2/ds^2 - V(s) on [s0, s1], discretized
/// with the standard second-order three-point stencil on n interior nodes.
struct ModeSpectrum {
    int m = 0;
    int negative_count = 0;
    double smallest_eigenvalue = 0.0;
};

namespace detail {

// Number of eigenvalues of the symmetric tridiagonal matrix below mu,
// via the LDL^T inertia recurrence (Sturm count).
inline int tridiag_count_below(const std::vector<double>& diag, double off2,
                               double mu) {
    int count = 0;
    double q = 1.0;
    for (size_t k = 0; k < diag.size(); ++k) {
        q = (k == 0) ? diag[0] - mu : diag[k] - mu - off2 / q;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace detail

inline ModeSpectrum mode_spectrum(const std::function<double(double)>& v,
                                  double s0, double s1, int n, int m_label = 0) {
    if (!(s1 > s0)) throw std::invalid_argument("mode_spectrum: empty interval");
    if (n < 2) throw std::invalid_argument("mode_spectrum: need n >= 2 nodes");
    const double h = (s1 - s0) / (n + 1);
    std::vector<double> diag(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        diag[k] = 2.0 / (h * h) - v(s0 + (k + 1) * h);
    const double off = -1.0 / (h * h), off2 = off * off;

    ModeSpectrum out;
    out.m = m_label;
    out.negative_count = detail::tridiag_count_below(diag, off2, 0.0);

    // Gershgorin bracket, then bisection for the bottom eigenvalue.
    double lo = diag[0], hi = diag[0];
    for (double d : diag) {
        lo = std::min(lo, d - 2.0 * std::abs(off));
        hi = std::max(hi, d + 2.0 * std::abs(off));
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::tridiag_count_below(diag, off2, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    out.smallest_eigenvalue = 0.5 * (lo + hi);
    return out;
}

}  // namespace cmclab
