#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmclab/io_util.hpp"
#include "cmclab/magnus.hpp"
#include "cmclab/mat2.hpp"
#include "cmclab/seeds.hpp"
#include "cmclab/surface.hpp"

namespace cmclab {

/// Stereographic coordinate of a point on S^2. from_north projects from the
/// pole (0,0,1); the alternative projects from (0,0,-1).
inline cplx stereographic(const Vec3& g, bool from_north = true) {
    const double d = from_north ? 1.0 - g.z : 1.0 + g.z;
    if (std::abs(d) < 1e-14)
        throw std::domain_error("stereographic: point at the projection pole");
    return cplx(g.x, g.y) / d;
}

/// Gauss-map connection data: nu in stereographic coordinates with the
/// z-derivative of its conjugate, and the target mean curvature H.
struct AAData {
    std::function<cplx(cplx)> nu;
    std::function<cplx(cplx)> nubar_z;
    double H = 0.0;
    double margin = 1e-6;  // floor for |1 - |nu|^4|

    void validate() const {
        if (!(H >= 0.0 && H < 1.0))
            throw std::invalid_argument("AAData: H outside [0, 1)");
        if (!nu || !nubar_z)
            throw std::invalid_argument("AAData: nu and nubar_z must be set");
    }
};

/// Weierstrass-type coefficient omega = -2 nubar_z / (sqrt(1-H^2)(1-|nu|^4)).
inline cplx aa_omega(const AAData& d, cplx z) {
    const cplx nu = d.nu(z);
    const double denom_pole = 1.0 - std::norm(nu) * std::norm(nu);
    if (std::abs(denom_pole) < d.margin)
        throw std::domain_error("aa_omega: |nu| too close to 1");
    return -2.0 * d.nubar_z(z) / (std::sqrt(1.0 - d.H * d.H) * denom_pole);
}

/// Rank-one coefficient alpha = [[-nu, nu^2],[-1, nu]] omega.
inline Mat2 aa_alpha(const AAData& d, cplx z) {
    const cplx nu = d.nu(z);
    const cplx w = aa_omega(d, z);
    return Mat2{-nu, nu * nu, -1.0, nu} * w;
}

/// Connection coefficients of tau = ((1+H) alpha + (1-H) alpha*)/2
/// + (sqrt(1-H^2)/4) [sigma3, alpha + alpha*], split into its dz and dzbar
/// parts (alpha is a dz-form, alpha* a dzbar-form). Both parts are traceless.
inline std::pair<Mat2, Mat2> aa_tau(const AAData& d, cplx z) {
    const Mat2 m = aa_alpha(d, z);
    const Mat2 ms = m.adjoint();
    const double root = std::sqrt(1.0 - d.H * d.H);
    const Mat2 a = m * (0.5 * (1.0 + d.H)) + commutator(sigma3(), m) * (0.25 * root);
    const Mat2 b = ms * (0.5 * (1.0 - d.H)) + commutator(sigma3(), ms) * (0.25 * root);
    return {a, b};
}

inline ConnectionField aa_connection(const AAData& d) {
    d.validate();
    ConnectionField c;
    c.A = [d](cplx z) { return aa_tau(d, z).first; };
    c.B = [d](cplx z) { return aa_tau(d, z).second; };
    return c;
}

/// Induced metric coefficient (1+|nu|^2)^2 |omega|^2. Zero flags a
/// non-immersed point (holomorphic nu).
inline double induced_metric_aa(const AAData& d, cplx z) {
    const double s = 1.0 + std::norm(d.nu(z));
    return s * s * std::norm(aa_omega(d, z));
}

/// Integrate F^{-1}dF = tau over a grid. The immersion is f = F F* per node.
inline FrameGrid aa_reconstruct(const AAData& d, const GridSpec& grid,
                                const IntegratorConfig& cfg = {},
                                FlatnessPolicy policy = FlatnessPolicy::enforce,
                                int threads = 1,
                                const Mat2& initial = Mat2::identity(),
                                const FlatnessScan& scan = {1e-6, 1e-3, 5e-3, 64, {}}) {
    return integrate_grid(aa_connection(d), grid, cfg, policy, threads, initial, scan);
}

/// Complex scalar field sampled on a uniform grid, evaluated anywhere in the
/// covered region with bicubic (Catmull-Rom) interpolation. Evaluation needs
/// a full 4x4 stencil, so the usable region excludes a one-cell border.
class SampledComplexField {
  public:
    SampledComplexField() = default;
    SampledComplexField(double x0, double y0, double hx, double hy, int nx, int ny)
        : x0_(x0), y0_(y0), hx_(hx), hy_(hy), nx_(nx), ny_(ny),
          v_(size_t(nx) * ny) {
        if (nx < 4 || ny < 4)
            throw std::invalid_argument("SampledComplexField: need at least 4x4 samples");
        if (!(hx > 0.0) || !(hy > 0.0))
            throw std::invalid_argument("SampledComplexField: spacing must be positive");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    cplx node(int i, int j) const { return {x0_ + i * hx_, y0_ + j * hy_}; }
    cplx& at(int i, int j) { return v_[size_t(j) * nx_ + i]; }
    cplx at(int i, int j) const { return v_[size_t(j) * nx_ + i]; }

    template <typename F>
    void fill(F&& f) {
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) at(i, j) = f(node(i, j));
    }

    cplx eval(cplx z) const {
        double sx = (z.real() - x0_) / hx_, sy = (z.imag() - y0_) / hy_;
        int i = int(std::floor(sx)), j = int(std::floor(sy));
        // clamp into the innermost cell range able to host a 4x4 stencil
        i = std::max(1, std::min(i, nx_ - 3));
        j = std::max(1, std::min(j, ny_ - 3));
        const double tx = sx - i, ty = sy - j;
        if (tx < -1e-9 || tx > 1.0 + 1e-9 || ty < -1e-9 || ty > 1.0 + 1e-9)
            throw std::domain_error("SampledComplexField: evaluation outside grid interior");
        cplx col[4];
        for (int r = 0; r < 4; ++r)
            col[r] = catmull_rom(at(i - 1, j - 1 + r), at(i, j - 1 + r),
                                 at(i + 1, j - 1 + r), at(i + 2, j - 1 + r), tx);
        return catmull_rom(col[0], col[1], col[2], col[3], ty);
    }

    /// d/dz of conj(field) at the nodes, by central differences (4th order
    /// where the stencil fits, 2nd order one ring from the border, copied on
    /// the outermost ring).
    SampledComplexField conjugate_z_derivative() const {
        SampledComplexField d(x0_, y0_, hx_, hy_, nx_, ny_);
        auto val = [&](int i, int j) { return std::conj(at(i, j)); };
        for (int j = 1; j < ny_ - 1; ++j)
            for (int i = 1; i < nx_ - 1; ++i) {
                cplx dx, dy;
                if (i >= 2 && i < nx_ - 2)
                    dx = (-val(i + 2, j) + 8.0 * val(i + 1, j) - 8.0 * val(i - 1, j) +
                          val(i - 2, j)) /
                         (12.0 * hx_);
                else
                    dx = (val(i + 1, j) - val(i - 1, j)) / (2.0 * hx_);
                if (j >= 2 && j < ny_ - 2)
                    dy = (-val(i, j + 2) + 8.0 * val(i, j + 1) - 8.0 * val(i, j - 1) +
                          val(i, j - 2)) /
                         (12.0 * hy_);
                else
                    dy = (val(i, j + 1) - val(i, j - 1)) / (2.0 * hy_);
                d.at(i, j) = 0.5 * (dx - cplx(0, 1) * dy);
            }
        for (int i = 0; i < nx_; ++i) {
            d.at(i, 0) = d.at(i, std::min(1, ny_ - 1));
            d.at(i, ny_ - 1) = d.at(i, ny_ - 2);
        }
        for (int j = 0; j < ny_; ++j) {
            d.at(0, j) = d.at(std::min(1, nx_ - 1), j);
            d.at(nx_ - 1, j) = d.at(nx_ - 2, j);
        }
        return d;
    }

    /// CSV with columns x, y, Re nu, Im nu, one row per node, row-major.
    /// The grid must be uniform and complete.
    static SampledComplexField from_csv(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> xs, ys;
        std::vector<cplx> vals;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            double x, y, re, im;
            char comma;
            if (!(ss >> x >> comma >> y >> comma >> re >> comma >> im))
                throw std::runtime_error("malformed CSV row: " + line);
            xs.push_back(x);
            ys.push_back(y);
            vals.push_back({re, im});
        }
        if (vals.size() < 16) throw std::runtime_error("CSV grid too small");
        // infer nx from the first repeat of x
        size_t nx = 0;
        for (size_t k = 1; k < xs.size(); ++k)
            if (std::abs(xs[k] - xs[0]) < 1e-15) {
                nx = k;
                break;
            }
        if (nx < 4 || vals.size() % nx != 0)
            throw std::runtime_error("CSV rows do not form a rectangular grid");
        const size_t ny = vals.size() / nx;
        SampledComplexField f(xs[0], ys[0], xs[1] - xs[0], ys[nx] - ys[0], int(nx),
                              int(ny));
        f.v_ = std::move(vals);
        return f;
    }

    void to_csv(const std::filesystem::path& path) const {
        std::string out = "x,y,re_nu,im_nu\n";
        char buf[120];
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                const cplx z = node(i, j), v = at(i, j);
                std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.17g,%.17g\n",
                              z.real(), z.imag(), v.real(), v.imag());
                out += buf;
            }
        write_file_atomic(path, out);
    }

  private:
    static cplx catmull_rom(cplx p0, cplx p1, cplx p2, cplx p3, double t) {
        return 0.5 * (2.0 * p1 + t * ((p2 - p0) +
                                      t * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                                           t * (3.0 * (p1 - p2) + p3 - p0))));
    }

    double x0_ = 0.0, y0_ = 0.0, hx_ = 1.0, hy_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<cplx> v_;
};

/// AAData backed by a sampled nu grid: values by bicubic interpolation,
/// nubar_z precomputed at the nodes by central differences and interpolated
/// the same way.
inline AAData aa_from_samples(SampledComplexField nu_field, double h) {
    auto nu = std::make_shared<const SampledComplexField>(std::move(nu_field));
    auto dz = std::make_shared<const SampledComplexField>(nu->conjugate_z_derivative());
    AAData d;
    d.H = h;
    d.nu = [nu](cplx z) { return nu->eval(z); };
    d.nubar_z = [dz](cplx z) { return dz->eval(z); };
    return d;
}

}  // namespace cmclab
