#pragma once

#include "twso/grid.hpp"

// Second-order finite differences on a periodic grid. Index (i, j) is
// (row, column); x runs along columns and y along rows.

namespace twso {

/// Per-pixel 2x2 matrix stored as four planes:
///   [ a11  a12 ]
///   [ a21  a22 ]
struct MatrixField {
    ScalarField a11, a21, a12, a22;

    MatrixField() = default;
    MatrixField(int rows, int cols, double fill = 0.0)
        : a11(rows, cols, fill), a21(rows, cols, fill), a12(rows, cols, fill), a22(rows, cols, fill) {}
    MatrixField(ScalarField p11, ScalarField p21, ScalarField p12, ScalarField p22);

    [[nodiscard]] int rows() const noexcept { return a11.rows(); }
    [[nodiscard]] int cols() const noexcept { return a11.cols(); }
    [[nodiscard]] bool same_shape(const ScalarField& f) const noexcept { return a11.same_shape(f); }

    MatrixField& operator+=(const MatrixField& o);
    MatrixField& operator-=(const MatrixField& o);
    MatrixField& operator*=(double a) noexcept;

    friend MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
    friend MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }

    bool operator==(const MatrixField&) const = default;
};

/// Sum over pixels and all four planes.
double inner(const MatrixField& a, const MatrixField& b);
double norm2(const MatrixField& a);

/// u(i,j-1) - 2u(i,j) + u(i,j+1).
ScalarField dxx(const ScalarField& u);
/// u(i-1,j) - 2u(i,j) + u(i+1,j).
ScalarField dyy(const ScalarField& u);
/// Forward mixed difference u(i,j) - u(i+1,j) - u(i,j+1) + u(i+1,j+1).
ScalarField dxy_forward(const ScalarField& u);
/// Backward mixed difference u(i,j) - u(i,j-1) - u(i-1,j) + u(i-1,j-1);
/// the adjoint of dxy_forward.
ScalarField dxy_backward(const ScalarField& u);

/// Discrete Hessian. Both off-diagonal planes hold dxy_forward(u).
MatrixField hessian(const ScalarField& u);

/// Second-order divergence, the adjoint of hessian():
/// dxx(P11) + dxy_backward(P21) + dxy_backward(P12) + dyy(P22).
ScalarField div2(const MatrixField& p);

struct Gradient {
    ScalarField x;
    ScalarField y;
};

/// Central differences with periodic wrap.
Gradient gradient_central(const ScalarField& u);

}  // namespace twso
