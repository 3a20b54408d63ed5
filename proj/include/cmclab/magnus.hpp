#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cmclab/mat2.hpp"
#include "cmclab/seeds.hpp"

namespace cmclab {

/// Step-control and tolerance knobs of the adaptive integrator.
struct IntegratorConfig {
    double atol = 1e-10;   // normalization of the local error estimate
    double h0 = 1e-2;      // initial arclength step
    double hmin = 1e-9;
    double hmax = 0.5;
    double safety = 0.9;
    int renormalize_every = 1;  // accepted steps between det renormalizations
    long max_steps = 2'000'000;

    void validate() const {
        if (!(hmin > 0.0 && hmin <= h0 && h0 <= hmax))
            throw std::invalid_argument("IntegratorConfig: need 0 < hmin <= h0 <= hmax");
        if (!(atol > 0.0)) throw std::invalid_argument("IntegratorConfig: atol <= 0");
    }
};

/// Integration path: a polyline of >= 2 vertices and the frame at its start.
struct PathSpec {
    std::vector<cplx> points;
    Mat2 initial_frame = Mat2::identity();

    static PathSpec segment(cplx z0, cplx z1, Mat2 init = Mat2::identity()) {
        return {{z0, z1}, init};
    }
    void validate() const {
        if (points.size() < 2)
            throw std::invalid_argument("PathSpec: polyline needs at least 2 points");
    }
};

struct PathDiagnostics {
    long steps_accepted = 0;
    long steps_rejected = 0;
    double max_local_error = 0.0;   // max accepted normalized error
    double max_det_drift = 0.0;     // before renormalization
    double renorm_total = 0.0;      // accumulated |det - 1| removed

    void merge(const PathDiagnostics& o) {
        steps_accepted += o.steps_accepted;
        steps_rejected += o.steps_rejected;
        max_local_error = std::max(max_local_error, o.max_local_error);
        max_det_drift = std::max(max_det_drift, o.max_det_drift);
        renorm_total += o.renorm_total;
    }
};

struct PathResult {
    Mat2 frame;
    PathDiagnostics diag;
};

/// Fourth-order two-point Magnus increment over the straight segment
/// [z0, z1]: with the pullback W(t) = A(z(t)) dz + B(z(t)) dzbar evaluated at
/// the Gauss--Legendre nodes t = 1/2 -+ sqrt(3)/6,
///   sigma = (W1 + W2)/2 - (sqrt(3)/12) [W1, W2],  increment = exp(sigma).
/// Exact for connections constant along the segment.
inline Mat2 magnus_step(const ConnectionField& c, cplx z0, cplx z1) {
    static const double offset = std::sqrt(3.0) / 6.0;
    const cplx dz = z1 - z0, dzb = std::conj(dz);
    const cplx za = z0 + (0.5 - offset) * dz;
    const cplx zb = z0 + (0.5 + offset) * dz;
    const Mat2 w1 = c.A(za) * dz + c.B(za) * dzb;
    const Mat2 w2 = c.A(zb) * dz + c.B(zb) * dzb;
    const Mat2 sigma =
        (w1 + w2) * 0.5 - commutator(w1, w2) * (std::sqrt(3.0) / 12.0);
    return exp_traceless(sigma);
}

/// Fixed-step composition over one segment; used for order studies.
inline Mat2 integrate_segment_fixed(const ConnectionField& c, cplx z0, cplx z1,
                                    int nsteps, Mat2 frame = Mat2::identity()) {
    if (nsteps < 1) throw std::invalid_argument("integrate_segment_fixed: nsteps < 1");
    for (int k = 0; k < nsteps; ++k) {
        const cplx a = z0 + (double(k) / nsteps) * (z1 - z0);
        const cplx b = z0 + (double(k + 1) / nsteps) * (z1 - z0);
        frame = frame * magnus_step(c, a, b);
        frame = renormalize_det(frame);
    }
    return frame;
}

namespace detail {

// Adaptive integration along one straight segment, frame updated in place.
// Local error estimated by step doubling: eps = |M_h - M_{h/2}^2|_F / atol,
// accept iff eps <= 1, propagate the half-step composition, and update
//   h <- min{2, max{1/2, safety * eps^{-1/4}}} * h.
inline void integrate_segment_adaptive(const ConnectionField& c, cplx z0, cplx z1,
                                       const IntegratorConfig& cfg, Mat2& frame,
                                       double& h, PathDiagnostics& diag) {
    const double len = std::abs(z1 - z0);
    if (len == 0.0) return;
    const cplx dir = (z1 - z0) / len;
    double s = 0.0;
    int since_renorm = 0;
    while (s < len - 1e-15 * len) {
        if (diag.steps_accepted + diag.steps_rejected > cfg.max_steps)
            throw std::runtime_error("integrate_path: step budget exhausted");
        const double hstep = std::min(h, len - s);
        const cplx za = z0 + s * dir;
        const cplx zm = z0 + (s + 0.5 * hstep) * dir;
        const cplx zb = z0 + (s + hstep) * dir;
        const Mat2 m_full = magnus_step(c, za, zb);
        const Mat2 m_half = magnus_step(c, za, zm) * magnus_step(c, zm, zb);
        const double eps = (m_full - m_half).frobenius_norm() / cfg.atol;
        double factor = eps > 0.0 ? cfg.safety * std::pow(eps, -0.25) : 2.0;
        factor = std::clamp(factor, 0.5, 2.0);
        if (eps <= 1.0) {
            frame = frame * m_half;
            s += hstep;
            ++diag.steps_accepted;
            diag.max_local_error = std::max(diag.max_local_error, eps);
            const double drift = std::abs(frame.det() - 1.0);
            diag.max_det_drift = std::max(diag.max_det_drift, drift);
            if (++since_renorm >= cfg.renormalize_every) {
                frame = renormalize_det(frame);
                diag.renorm_total += drift;
                since_renorm = 0;
            }
        } else {
            ++diag.steps_rejected;
            if (hstep <= cfg.hmin * (1.0 + 1e-12))
                throw std::runtime_error(
                    "integrate_path: step underflow at hmin (near-singular data)");
        }
        h = std::clamp(factor * h, cfg.hmin, cfg.hmax);
    }
    frame = renormalize_det(frame);
}

}  // namespace detail

inline PathResult integrate_path(const ConnectionField& c, const PathSpec& path,
                                 const IntegratorConfig& cfg = {}) {
    path.validate();
    cfg.validate();
    Mat2 frame = path.initial_frame;
    PathDiagnostics diag;
    double h = cfg.h0;
    for (size_t k = 0; k + 1 < path.points.size(); ++k)
        detail::integrate_segment_adaptive(c, path.points[k], path.points[k + 1],
                                           cfg, frame, h, diag);
    return {frame, diag};
}

/// Rectangular integration grid [x0,x1] x [y0,y1], nx*ny nodes.
struct GridSpec {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    int nx = 2, ny = 2;

    void validate() const {
        if (nx < 2 || ny < 2) throw std::invalid_argument("GridSpec: nx, ny >= 2 required");
        if (!(x1 > x0) || !(y1 > y0))
            throw std::invalid_argument("GridSpec: degenerate bounds");
        if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) ||
            !std::isfinite(y1))
            throw std::invalid_argument("GridSpec: bounds must be finite");
    }
    double hx() const { return (x1 - x0) / (nx - 1); }
    double hy() const { return (y1 - y0) / (ny - 1); }
    cplx z(int i, int j) const { return {x0 + i * hx(), y0 + j * hy()}; }
};

/// Flatness pre-scan thresholds for grid integration. The integrator samples
/// the residual before integrating: above `warn` the result is flagged,
/// above `fail` the data is treated as non-integrable.
struct FlatnessScan {
    double warn = 1e-6;
    double fail = 1e-3;
    double stencil_h = 1e-4;
    int max_samples = 225;
    std::optional<FlatnessMode> mode = {};  // default: analytic when available
};

enum class FlatnessPolicy { enforce, warn_only };

struct FrameGrid {
    GridSpec spec;
    std::vector<Mat2> frames;       // row-major, index j*nx + i
    std::vector<double> det_drift;  // recorded before renormalization
    long step_count = 0;
    double max_local_error = 0.0;
    double max_flatness_residual = 0.0;
    bool flatness_warning = false;
    double cell_defect = 0.0;  // max row-major vs column-major mismatch
    PathDiagnostics diag;

    int idx(int i, int j) const { return j * spec.nx + i; }
    const Mat2& frame(int i, int j) const { return frames[idx(i, j)]; }
};

/// Integrate the frame over a grid: up the left column, then across each row
/// (rows are independent and may run on several threads; the result does not
/// depend on the thread count). A subset of cells is re-integrated
/// column-major first to quantify path dependence, which vanishes for flat
/// data.
inline FrameGrid integrate_grid(const ConnectionField& c, const GridSpec& grid,
                                const IntegratorConfig& cfg = {},
                                FlatnessPolicy policy = FlatnessPolicy::enforce,
                                int threads = 1,
                                const Mat2& initial = Mat2::identity(),
                                const FlatnessScan& scan = {}) {
    grid.validate();
    cfg.validate();
    FrameGrid out;
    out.spec = grid;
    out.frames.assign(size_t(grid.nx) * grid.ny, Mat2::identity());
    out.det_drift.assign(out.frames.size(), 0.0);

    // flatness pre-scan on a subsampled set of nodes
    {
        const int target = std::max(1, scan.max_samples);
        const int si = std::max(1, grid.nx / int(std::sqrt(double(target)) + 1));
        const int sj = std::max(1, grid.ny / int(std::sqrt(double(target)) + 1));
        for (int j = 0; j < grid.ny; j += sj)
            for (int i = 0; i < grid.nx; i += si) {
                const auto fs = flatness_residual(c, grid.z(i, j), scan.stencil_h, scan.mode);
                out.max_flatness_residual = std::max(
                    out.max_flatness_residual, fs.residual.frobenius_norm());
            }
        if (out.max_flatness_residual > scan.warn) out.flatness_warning = true;
        if (out.max_flatness_residual > scan.fail && policy == FlatnessPolicy::enforce)
            throw std::runtime_error(
                "integrate_grid: flatness residual above failure threshold "
                "(non-integrable data)");
    }

    // left column
    std::vector<PathDiagnostics> row_diag(size_t(grid.ny));
    {
        Mat2 f = initial;
        double h = cfg.h0;
        out.frames[out.idx(0, 0)] = f;
        for (int j = 1; j < grid.ny; ++j) {
            detail::integrate_segment_adaptive(c, grid.z(0, j - 1), grid.z(0, j),
                                               cfg, f, h, row_diag[0]);
            out.frames[out.idx(0, j)] = f;
        }
    }

    // rows, parallelizable
    auto run_row = [&](int j) {
        Mat2 f = out.frames[out.idx(0, j)];
        double h = cfg.h0;
        PathDiagnostics d;
        for (int i = 1; i < grid.nx; ++i) {
            detail::integrate_segment_adaptive(c, grid.z(i - 1, j), grid.z(i, j),
                                               cfg, f, h, d);
            out.frames[out.idx(i, j)] = f;
            out.det_drift[out.idx(i, j)] = d.max_det_drift;
        }
        if (j > 0) row_diag[j] = d; else row_diag[0].merge(d);
    };
    threads = std::max(1, threads);
    if (threads == 1 || grid.ny < 4) {
        for (int j = 0; j < grid.ny; ++j) run_row(j);
    } else {
        std::vector<std::thread> pool;
        const int nt = std::min(threads, grid.ny);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (int j = t; j < grid.ny; j += nt) run_row(j);
            });
        for (auto& th : pool) th.join();
    }
    for (int j = 0; j < grid.ny; ++j) out.diag.merge(row_diag[j]);
    out.step_count = out.diag.steps_accepted;
    out.max_local_error = out.diag.max_local_error;

    // cross-check: column-major re-integration on a fixed random cell sample
    {
        std::mt19937 rng(0x5eed5u);
        std::uniform_int_distribution<int> di(1, grid.nx - 1), dj(1, grid.ny - 1);
        const int samples = std::max(10, std::min(20, (grid.nx - 1) * (grid.ny - 1)));
        for (int k = 0; k < samples; ++k) {
            const int i = di(rng), j = dj(rng);
            PathSpec alt{{grid.z(0, 0), grid.z(i, 0), grid.z(i, j)}, initial};
            const Mat2 f_alt = integrate_path(c, alt, cfg).frame;
            const double defect =
                (f_alt - out.frames[out.idx(i, j)]).frobenius_norm();
            out.cell_defect = std::max(out.cell_defect, defect);
        }
    }
    return out;
}

}  // namespace cmclab
