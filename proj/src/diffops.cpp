#include "twso/diffops.hpp"

#include <cmath>
#include <stdexcept>

namespace twso {

namespace {

// Neighbour indices with periodic wrap, computed once per row/column.
struct Neighbours {
    int prev;
    int next;
};

Neighbours around(int k, int n) noexcept { return {wrap_index(k - 1, n), wrap_index(k + 1, n)}; }

}  // namespace

MatrixField::MatrixField(ScalarField p11, ScalarField p21, ScalarField p12, ScalarField p22)
    : a11(std::move(p11)), a21(std::move(p21)), a12(std::move(p12)), a22(std::move(p22)) {
    if (!a11.same_shape(a21) || !a11.same_shape(a12) || !a11.same_shape(a22)) {
        throw std::invalid_argument("matrix field planes differ in shape");
    }
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
    a11 += o.a11;
    a21 += o.a21;
    a12 += o.a12;
    a22 += o.a22;
    return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& o) {
    a11 -= o.a11;
    a21 -= o.a21;
    a12 -= o.a12;
    a22 -= o.a22;
    return *this;
}

MatrixField& MatrixField::operator*=(double a) noexcept {
    a11 *= a;
    a21 *= a;
    a12 *= a;
    a22 *= a;
    return *this;
}

double inner(const MatrixField& a, const MatrixField& b) {
    return inner(a.a11, b.a11) + inner(a.a21, b.a21) + inner(a.a12, b.a12) + inner(a.a22, b.a22);
}

double norm2(const MatrixField& a) { return std::sqrt(inner(a, a)); }

ScalarField dxx(const ScalarField& u) {
    const int m = u.rows(), n = u.cols();
    ScalarField out(m, n);
    for (int j = 0; j < n; ++j) {
        const auto [jm, jp] = around(j, n);
        for (int i = 0; i < m; ++i) out(i, j) = u(i, jm) - 2.0 * u(i, j) + u(i, jp);
    }
    return out;
}

ScalarField dyy(const ScalarField& u) {
    const int m = u.rows(), n = u.cols();
    ScalarField out(m, n);
    for (int i = 0; i < m; ++i) {
        const auto [im, ip] = around(i, m);
        for (int j = 0; j < n; ++j) out(i, j) = u(im, j) - 2.0 * u(i, j) + u(ip, j);
    }
    return out;
}

ScalarField dxy_forward(const ScalarField& u) {
    const int m = u.rows(), n = u.cols();
    ScalarField out(m, n);
    for (int i = 0; i < m; ++i) {
        const int ip = wrap_index(i + 1, m);
        for (int j = 0; j < n; ++j) {
            const int jp = wrap_index(j + 1, n);
            out(i, j) = u(i, j) - u(ip, j) - u(i, jp) + u(ip, jp);
        }
    }
    return out;
}

ScalarField dxy_backward(const ScalarField& u) {
    const int m = u.rows(), n = u.cols();
    ScalarField out(m, n);
    for (int i = 0; i < m; ++i) {
        const int im = wrap_index(i - 1, m);
        for (int j = 0; j < n; ++j) {
            const int jm = wrap_index(j - 1, n);
            out(i, j) = u(i, j) - u(i, jm) - u(im, j) + u(im, jm);
        }
    }
    return out;
}

MatrixField hessian(const ScalarField& u) {
    ScalarField mixed = dxy_forward(u);
    ScalarField mixed_copy = mixed;
    return {dxx(u), std::move(mixed), std::move(mixed_copy), dyy(u)};
}

ScalarField div2(const MatrixField& p) {
    ScalarField out = dxx(p.a11);
    out += dxy_backward(p.a21);
    out += dxy_backward(p.a12);
    out += dyy(p.a22);
    return out;
}

Gradient gradient_central(const ScalarField& u) {
    const int m = u.rows(), n = u.cols();
    Gradient g{ScalarField(m, n), ScalarField(m, n)};
    for (int i = 0; i < m; ++i) {
        const auto [im, ip] = around(i, m);
        for (int j = 0; j < n; ++j) {
            const auto [jm, jp] = around(j, n);
            g.x(i, j) = 0.5 * (u(i, jp) - u(i, jm));
            g.y(i, j) = 0.5 * (u(ip, j) - u(im, j));
        }
    }
    return g;
}

}  // namespace twso
