#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "cmclab/mat2.hpp"

namespace cmclab {

/// Right-hand side of the flatness system for the one-variable rank-one seed
///   g'   = -(2 lambda/(1+lambda)) rho (1+g^2)^2
///   rho' =  (4 lambda/(1+lambda)) g rho^2 (1+g^2)
inline std::pair<double, double> ode_rhs(double g, double rho, double lambda) {
    const double k = lambda / (1.0 + lambda);
    const double one_g2 = 1.0 + g * g;
    return {-2.0 * k * rho * one_g2 * one_g2, 4.0 * k * g * rho * rho * one_g2};
}

/// Closed-form solution g = tan(-2 lambda C x/(1+lambda) + delta),
/// rho = C/(1+g^2), valid away from the tangent poles.
inline std::pair<double, double> tan_solution(double c, double delta,
                                              double lambda, double x,
                                              double pole_margin = 0.05) {
    const double arg = -2.0 * lambda * c * x / (1.0 + lambda) + delta;
    // distance from arg to the nearest pole pi/2 + k pi
    const double t = (arg - M_PI / 2.0) / M_PI;
    const double dist = std::abs(t - std::round(t)) * M_PI;
    if (dist < pole_margin)
        throw std::domain_error("tan_solution: argument within pole margin");
    const double g = std::tan(arg);
    return {g, c / (1.0 + g * g)};
}

/// Nilpotent profile matrix rho * [[-g, g^2],[-1, g]] (determinant 0).
inline Mat2 rank_one_profile(double g, double rho) {
    return {-rho * g, rho * g * g, -rho, rho * g};
}

struct TanProfile {
    double c = 1.0;
    double delta = 0.0;
    double lambda = 1.0;
    double pole_margin = 0.05;

    void validate() const {
        if (c == 0.0) throw std::invalid_argument("TanProfile: C must be nonzero");
        if (!(lambda > 0.0))
            throw std::invalid_argument("TanProfile: lambda must be real positive");
    }
};

/// Numerical profile integrating the flatness system from (g0, rho0).
/// build() integrates once with classical RK4 on a fixed fine step and caches
/// the trajectory; eval() interpolates with cubic Hermite polynomials using
/// the cached states and the exact right-hand side as slope. Build once, then
/// read from any number of threads.
class OdeProfile {
  public:
    double g0 = 0.0, rho0 = 1.0, lambda = 1.0;

    OdeProfile() = default;
    OdeProfile(double g0_, double rho0_, double lambda_)
        : g0(g0_), rho0(rho0_), lambda(lambda_) {
        if (rho0 == 0.0) throw std::invalid_argument("OdeProfile: rho0 must be nonzero");
        if (!(lambda > 0.0))
            throw std::invalid_argument("OdeProfile: lambda must be real positive");
    }

    void build(double x_min, double x_max, double step = 1e-3) {
        if (!(x_min <= 0.0 && x_max >= 0.0))
            throw std::invalid_argument("OdeProfile: domain must contain x = 0");
        const int n_right = int(std::ceil((x_max + 1e-15) / step));
        const int n_left = int(std::ceil((-x_min + 1e-15) / step));
        x_min_ = -n_left * step;
        dx_ = step;
        g_.assign(size_t(n_left + n_right + 1), 0.0);
        rho_.assign(g_.size(), 0.0);
        g_[n_left] = g0;
        rho_[n_left] = rho0;
        for (int k = n_left; k < n_left + n_right; ++k)
            step_rk4(k, k + 1, step);
        for (int k = n_left; k > 0; --k)
            step_rk4(k, k - 1, -step);
        built_ = true;
    }

    bool built() const { return built_; }

    std::pair<double, double> eval(double x) const {
        if (!built_) throw std::logic_error("OdeProfile: trajectory not built");
        const double x_max = x_min_ + dx_ * double(g_.size() - 1);
        if (x < x_min_ - 1e-12 || x > x_max + 1e-12)
            throw std::domain_error("OdeProfile: x outside built trajectory");
        double s = (x - x_min_) / dx_;
        int k = int(std::floor(s));
        if (k < 0) k = 0;
        if (k >= int(g_.size()) - 1) k = int(g_.size()) - 2;
        const double t = s - k;
        const auto d0 = ode_rhs(g_[k], rho_[k], lambda);
        const auto d1 = ode_rhs(g_[k + 1], rho_[k + 1], lambda);
        return {hermite(g_[k], d0.first, g_[k + 1], d1.first, t),
                hermite(rho_[k], d0.second, rho_[k + 1], d1.second, t)};
    }

  private:
    double hermite(double y0, double m0, double y1, double m1, double t) const {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * dx_ * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * dx_ * m1;
    }

    void step_rk4(int from, int to, double h) {
        double g = g_[from], r = rho_[from];
        const auto k1 = ode_rhs(g, r, lambda);
        const auto k2 = ode_rhs(g + 0.5 * h * k1.first, r + 0.5 * h * k1.second, lambda);
        const auto k3 = ode_rhs(g + 0.5 * h * k2.first, r + 0.5 * h * k2.second, lambda);
        const auto k4 = ode_rhs(g + h * k3.first, r + h * k3.second, lambda);
        g_[to] = g + h / 6.0 * (k1.first + 2 * k2.first + 2 * k3.first + k4.first);
        rho_[to] = r + h / 6.0 * (k1.second + 2 * k2.second + 2 * k3.second + k4.second);
    }

    bool built_ = false;
    double x_min_ = 0.0, dx_ = 0.0;
    std::vector<double> g_, rho_;
};

/// Fixed nilpotent direction eta = a(z) E21 dz. a_zbar must be supplied for
/// non-holomorphic a; it defaults to zero.
struct FixedNilpotent {
    std::function<cplx(cplx)> a = [](cplx) { return cplx(1.0); };
    std::function<cplx(cplx)> a_zbar = [](cplx) { return cplx(0.0); };
};

using Vec2C = std::array<cplx, 2>;

/// Generic outer product eta = v w^t dz with the null pairing w^t v = 0.
struct OuterProduct {
    std::function<Vec2C(cplx)> v;
    std::function<Vec2C(cplx)> w;
};

using RankOneSeed = std::variant<TanProfile, OdeProfile, FixedNilpotent, OuterProduct>;

/// Coefficient matrix of the (1,0)-form at z. Nilpotent (det = 0) for every
/// variant; the outer-product variant additionally checks the null pairing.
inline Mat2 seed_coefficient(const RankOneSeed& seed, cplx z) {
    return std::visit(
        [&](const auto& s) -> Mat2 {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TanProfile>) {
                s.validate();
                auto [g, rho] = tan_solution(s.c, s.delta, s.lambda, z.real(), s.pole_margin);
                return rank_one_profile(g, rho);
            } else if constexpr (std::is_same_v<T, OdeProfile>) {
                auto [g, rho] = s.eval(z.real());
                return rank_one_profile(g, rho);
            } else if constexpr (std::is_same_v<T, FixedNilpotent>) {
                return s.a(z) * e21();
            } else {
                const Vec2C v = s.v(z), w = s.w(z);
                const cplx pairing = w[0] * v[0] + w[1] * v[1];
                const double scale =
                    std::sqrt((std::norm(v[0]) + std::norm(v[1])) *
                              (std::norm(w[0]) + std::norm(w[1])));
                if (std::abs(pairing) > 1e-12 * std::max(1.0, scale))
                    throw std::invalid_argument(
                        "seed_coefficient: outer-product pairing w^t v != 0");
                return {v[0] * w[0], v[0] * w[1], v[1] * w[0], v[1] * w[1]};
            }
        },
        seed);
}

/// Connection Omega = A dz + B dzbar evaluated pointwise. For seed-built
/// connections B = -lambda A^*. The analytic derivative closures are present
/// when the seed has closed-form x-derivatives; otherwise flatness checks
/// fall back to finite differences.
struct ConnectionField {
    std::function<Mat2(cplx)> A;
    std::function<Mat2(cplx)> B;
    std::function<Mat2(cplx)> A_zbar;  // may be empty
    std::function<Mat2(cplx)> B_z;     // may be empty
    std::optional<cplx> lambda;

    bool has_analytic() const { return bool(A_zbar) && bool(B_z); }
};

namespace detail {

// d/dx of the profile coefficient matrix, via the flatness system.
inline Mat2 profile_x_derivative(double g, double rho, double lambda) {
    auto [gd, rd] = ode_rhs(g, rho, lambda);
    // d/dx of rho*[[-g, g^2],[-1, g]]
    return {-rd * g - rho * gd, rd * g * g + 2.0 * rho * g * gd, -rd,
            rd * g + rho * gd};
}

}  // namespace detail

inline ConnectionField connection_from_seed(const RankOneSeed& seed, cplx lambda) {
    if (lambda == cplx(0.0))
        throw std::invalid_argument("connection_from_seed: lambda = 0");
    ConnectionField c;
    c.lambda = lambda;
    c.A = [seed](cplx z) { return seed_coefficient(seed, z); };
    c.B = [seed, lambda](cplx z) {
        return -lambda * seed_coefficient(seed, z).adjoint();
    };
    // Closed-form derivatives where available. The profile seeds depend on
    // x = Re z only, so d/dzbar = d/dz = (d/dx)/2 on them.
    if (const auto* tp = std::get_if<TanProfile>(&seed)) {
        const TanProfile s = *tp;
        auto ax = [s](cplx z) {
            auto [g, rho] = tan_solution(s.c, s.delta, s.lambda, z.real(), s.pole_margin);
            return detail::profile_x_derivative(g, rho, s.lambda);
        };
        c.A_zbar = [ax](cplx z) { return ax(z) * 0.5; };
        c.B_z = [ax, lambda](cplx z) { return -lambda * (ax(z) * 0.5).adjoint(); };
    } else if (const auto* op = std::get_if<OdeProfile>(&seed)) {
        const OdeProfile s = *op;
        auto ax = [s](cplx z) {
            auto [g, rho] = s.eval(z.real());
            return detail::profile_x_derivative(g, rho, s.lambda);
        };
        c.A_zbar = [ax](cplx z) { return ax(z) * 0.5; };
        c.B_z = [ax, lambda](cplx z) { return -lambda * (ax(z) * 0.5).adjoint(); };
    } else if (const auto* fn = std::get_if<FixedNilpotent>(&seed)) {
        const FixedNilpotent s = *fn;
        c.A_zbar = [s](cplx z) { return s.a_zbar(z) * e21(); };
        c.B_z = [s, lambda](cplx z) { return -lambda * std::conj(s.a_zbar(z)) * e12(); };
    }
    return c;
}

inline ConnectionField connection_from_seed(const RankOneSeed& seed) {
    if (const auto* tp = std::get_if<TanProfile>(&seed))
        return connection_from_seed(seed, cplx(tp->lambda));
    if (const auto* op = std::get_if<OdeProfile>(&seed))
        return connection_from_seed(seed, cplx(op->lambda));
    throw std::invalid_argument(
        "connection_from_seed: seed variant has no intrinsic lambda");
}

enum class FlatnessMode { analytic, finite_difference };

/// Flatness residual A_zbar - B_z - [A, B] at z, with an error bar for the
/// finite-difference stencil (estimated by comparing steps h and h/2, which
/// for an O(h^2) stencil estimates the h-step truncation).
struct FlatnessSample {
    Mat2 residual;
    double truncation_error = 0.0;
};

namespace detail {

inline Mat2 fd_residual(const ConnectionField& c, cplx z, double h) {
    const cplx i(0, 1);
    const Mat2 ax = (c.A(z + h) - c.A(z - h)) * (1.0 / (2.0 * h));
    const Mat2 ay = (c.A(z + i * h) - c.A(z - i * h)) * (1.0 / (2.0 * h));
    const Mat2 bx = (c.B(z + h) - c.B(z - h)) * (1.0 / (2.0 * h));
    const Mat2 by = (c.B(z + i * h) - c.B(z - i * h)) * (1.0 / (2.0 * h));
    const Mat2 a_zbar = (ax + i * ay) * 0.5;
    const Mat2 b_z = (bx - i * by) * 0.5;
    return a_zbar - b_z - commutator(c.A(z), c.B(z));
}

}  // namespace detail

inline FlatnessSample flatness_residual(const ConnectionField& c, cplx z,
                                        double h = 1e-4,
                                        std::optional<FlatnessMode> mode = {}) {
    const FlatnessMode m = mode.value_or(c.has_analytic()
                                             ? FlatnessMode::analytic
                                             : FlatnessMode::finite_difference);
    if (m == FlatnessMode::analytic) {
        if (!c.has_analytic())
            throw std::invalid_argument(
                "flatness_residual: no analytic derivatives on this connection");
        return {c.A_zbar(z) - c.B_z(z) - commutator(c.A(z), c.B(z)), 0.0};
    }
    const Mat2 r_h = detail::fd_residual(c, z, h);
    const Mat2 r_h2 = detail::fd_residual(c, z, 0.5 * h);
    return {r_h, (4.0 / 3.0) * (r_h - r_h2).frobenius_norm()};
}

}  // namespace cmclab
