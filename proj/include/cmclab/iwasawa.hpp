#pragma once

#include <cmath>
#include <stdexcept>

#include "cmclab/mat2.hpp"

namespace cmclab {

/// Element [[a, w],[0, 1/a]] of the triangular subgroup, a > 0. Determinant
/// is 1 by construction.
struct UpperTriangularPositive {
    double a = 1.0;
    cplx w{};

    Mat2 mat() const { return {a, w, 0.0, 1.0 / a}; }
};

/// Special unitary frame. Thin wrapper used where the unitarity contract
/// matters in a signature.
struct Su2 {
    Mat2 m = Mat2::identity();
};

struct IwasawaFactors {
    UpperTriangularPositive fs;
    Su2 phi;
};

/// Unique factorization F = Fs * Phi with Fs upper triangular (positive
/// diagonal) and Phi in SU(2). The second row of F has norm 1/a and is a
/// multiple of the second row of Phi; normalizing it fixes Phi, and w is the
/// component of the first row of F along that row.
inline IwasawaFactors iwasawa_split(const Mat2& f, double det_tol = 1e-10) {
    require_unimodular(f, det_tol, "iwasawa_split");
    const double row2 = std::sqrt(std::norm(f.a21) + std::norm(f.a22));
    if (!(row2 > 0.0) || !std::isfinite(row2))
        throw std::invalid_argument("iwasawa_split: singular frame");
    const double a = 1.0 / row2;
    const cplx p21 = a * f.a21, p22 = a * f.a22;
    const Mat2 phi{std::conj(p22), -std::conj(p21), p21, p22};
    const cplx w = f.a11 * std::conj(p21) + f.a12 * std::conj(p22);
    return {{a, w}, {phi}};
}

}  // namespace cmclab
