#pragma once

#include <memory>

#include "twso/diffops.hpp"
#include "twso/grid.hpp"

namespace twso {

/// DFT symbol of div2(hessian(.)) at column frequency q (of N) and row
/// frequency r (of M): 4 (cos(2 pi q / N) + cos(2 pi r / M) - 2)^2.
double bilaplacian_symbol(int q, int r, int cols, int rows);

/// theta1 + theta2 * symbol(q, r) on the full M x N frequency grid.
struct SpectralDenominator {
    int rows = 0;
    int cols = 0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    ScalarField values;  ///< indexed (row frequency r, column frequency q)

    static SpectralDenominator build(int rows, int cols, double theta1, double theta2);
    [[nodiscard]] bool matches(int m, int n, double t1, double t2) const noexcept {
        return rows == m && cols == n && theta1 == t1 && theta2 == t2;
    }
};

/// Exact periodic solve of (theta1 I + theta2 div2 hessian) u = rhs.
///
/// Owns FFTW plans and scratch buffers, so one instance must not be used
/// from two threads at once. Separate instances are independent.
class SpectralSolver {
public:
    SpectralSolver(int rows, int cols, double theta1, double theta2);
    ~SpectralSolver();
    SpectralSolver(SpectralSolver&&) noexcept;
    SpectralSolver& operator=(SpectralSolver&&) noexcept;
    SpectralSolver(const SpectralSolver&) = delete;
    SpectralSolver& operator=(const SpectralSolver&) = delete;

    /// Rebuilds the denominator if the penalty weights changed.
    void set_weights(double theta1, double theta2);

    [[nodiscard]] const SpectralDenominator& denominator() const noexcept { return denom_; }
    [[nodiscard]] double theta1() const noexcept { return denom_.theta1; }
    [[nodiscard]] double theta2() const noexcept { return denom_.theta2; }

    /// Throws std::runtime_error if the inverse transform leaves an
    /// imaginary part above 1e-9.
    ScalarField solve(const ScalarField& rhs);

    /// Largest |imag| seen on the most recent solve.
    [[nodiscard]] double last_imaginary_residue() const noexcept { return last_imag_; }

private:
    struct Plans;
    std::unique_ptr<Plans> plans_;
    SpectralDenominator denom_;
    double last_imag_ = 0.0;
};

/// u-update of the ADMM loop:
/// (theta1 I + theta2 div2 hessian) u = theta1 (u_tilde - s) + theta2 div2(V - d).
ScalarField solve_u(const ScalarField& u_tilde, const ScalarField& s, const MatrixField& v,
                    const MatrixField& d, SpectralSolver& solver);

}  // namespace twso
