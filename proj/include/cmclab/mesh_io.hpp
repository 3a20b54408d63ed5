#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cmclab/io_util.hpp"
#include "cmclab/surface.hpp"

namespace cmclab {

struct MeshStats {
    int vertices = 0;
    int triangles = 0;
    int degenerate_faces = 0;
};

namespace detail {

inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline double tri_area(const BallPoint& a, const BallPoint& b, const BallPoint& c) {
    const double ux = b.b1 - a.b1, uy = b.b2 - a.b2, uz = b.b3 - a.b3;
    const double vx = c.b1 - a.b1, vy = c.b2 - a.b2, vz = c.b3 - a.b3;
    const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz,
                 cz = ux * vy - uy * vx;
    return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

}  // namespace detail

/// OBJ export in ball coordinates (9 significant digits), quads split into
/// triangles, plus a per-vertex CSV sidecar:
///   x, y, b1, b2, b3, g1, g2, g3, e2u, H_num, ReQ, ImQ, conformal_defect
/// Geometry columns are NaN where no extraction is available (borders, or
/// geom == nullptr).
inline MeshStats export_mesh(const std::vector<SurfacePoint>& pts,
                             const GridSpec& grid,
                             const std::filesystem::path& obj_path,
                             const std::filesystem::path& csv_path,
                             const ExtractedGeometry* geom = nullptr) {
    const int nx = grid.nx, ny = grid.ny;
    if (int(pts.size()) != nx * ny)
        throw std::invalid_argument("export_mesh: point count does not match grid");
    MeshStats stats;
    stats.vertices = nx * ny;

    std::string obj;
    obj.reserve(size_t(stats.vertices) * 40);
    for (const auto& p : pts)
        obj += "v " + detail::fmt9(p.ball.b1) + " " + detail::fmt9(p.ball.b2) +
               " " + detail::fmt9(p.ball.b3) + "\n";
    auto vid = [nx](int i, int j) { return j * nx + i + 1; };  // OBJ is 1-based
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1),
                      d = vid(i, j + 1);
            const BallPoint &pa = pts[a - 1].ball, &pb = pts[b - 1].ball,
                            &pc = pts[c - 1].ball, &pd = pts[d - 1].ball;
            if (detail::tri_area(pa, pb, pc) < 1e-18) ++stats.degenerate_faces;
            if (detail::tri_area(pa, pc, pd) < 1e-18) ++stats.degenerate_faces;
            obj += "f " + std::to_string(a) + " " + std::to_string(b) + " " +
                   std::to_string(c) + "\n";
            obj += "f " + std::to_string(a) + " " + std::to_string(c) + " " +
                   std::to_string(d) + "\n";
            stats.triangles += 2;
        }
    write_file_atomic(obj_path, obj);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::string csv = "x,y,b1,b2,b3,g1,g2,g3,e2u,H_num,ReQ,ImQ,conformal_defect\n";
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k = j * nx + i;
            const auto& p = pts[k];
            const cplx z = grid.z(i, j);
            const bool have = geom != nullptr;
            const double e2u = have ? geom->e2u[k] : nan;
            const double h = have ? geom->h_num[k] : nan;
            const cplx q = have ? geom->q_num[k] : cplx(nan, nan);
            const double cd = have ? geom->conformal_defect[k] : nan;
            csv += detail::fmt9(z.real()) + "," + detail::fmt9(z.imag()) + "," +
                   detail::fmt9(p.ball.b1) + "," + detail::fmt9(p.ball.b2) + "," +
                   detail::fmt9(p.ball.b3) + "," + detail::fmt9(p.gauss.x) + "," +
                   detail::fmt9(p.gauss.y) + "," + detail::fmt9(p.gauss.z) + "," +
                   detail::fmt9(e2u) + "," + detail::fmt9(h) + "," +
                   detail::fmt9(q.real()) + "," + detail::fmt9(q.imag()) + "," +
                   detail::fmt9(cd) + "\n";
        }
    write_file_atomic(csv_path, csv);
    return stats;
}

}  // namespace cmclab
