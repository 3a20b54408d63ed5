#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmclab/magnus.hpp"
#include "cmclab/mat2.hpp"

namespace cmclab {

/// Holonomy of a closed loop. The matrix depends on the basepoint (a change
/// of basepoint conjugates it); trace and the unitarity defect are the
/// conjugation-stable outputs.
struct HolonomyResult {
    Mat2 rho;
    double unitarity_defect = 0.0;  // |rho rho* - I|_F
    cplx trace{};
    cplx basepoint{};
    PathDiagnostics diag;
};

inline HolonomyResult holonomy(const ConnectionField& c,
                               const std::vector<cplx>& loop,
                               const IntegratorConfig& cfg = {}) {
    if (loop.size() < 2)
        throw std::invalid_argument("holonomy: loop needs at least 2 points");
    if (std::abs(loop.front() - loop.back()) > 1e-12)
        throw std::invalid_argument("holonomy: loop is not closed");
    const PathResult r = integrate_path(c, {loop, Mat2::identity()}, cfg);
    HolonomyResult out;
    out.rho = r.frame;
    out.unitarity_defect =
        (r.frame * r.frame.adjoint() - Mat2::identity()).frobenius_norm();
    out.trace = r.frame.trace();
    out.basepoint = loop.front();
    out.diag = r.diag;
    return out;
}

/// Descent condition rho rho* = I, in tolerance. possibly_unitarizable flags
/// the necessary trace conditions (real trace in [-2, 2]) without deciding
/// unitarizability.
struct UnitarityReport {
    bool descends = false;
    double defect = 0.0;
    bool possibly_unitarizable = false;
};

inline UnitarityReport unitarity_report(const HolonomyResult& h,
                                        double tol = 1e-8) {
    UnitarityReport r;
    r.defect = h.unitarity_defect;
    r.descends = h.unitarity_defect <= tol;
    r.possibly_unitarizable =
        std::abs(h.trace.imag()) <= 1e-8 && std::abs(h.trace) <= 2.0 + 1e-12;
    return r;
}

}  // namespace cmclab
