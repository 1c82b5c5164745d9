#include "twso/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace twso {

namespace {

// The FFTW planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kMaxImaginaryResidue = 1e-9;

}  // namespace

double bilaplacian_symbol(int q, int r, int cols, int rows) {
    const double cx = std::cos(2.0 * std::numbers::pi * q / cols);
    const double cy = std::cos(2.0 * std::numbers::pi * r / rows);
    const double t = cx + cy - 2.0;
    return 4.0 * t * t;
}

SpectralDenominator SpectralDenominator::build(int rows, int cols, double theta1, double theta2) {
    if (!(theta1 > 0.0) || !(theta2 > 0.0)) {
        throw std::invalid_argument("spectral solve needs theta1 > 0 and theta2 > 0");
    }
    SpectralDenominator d{rows, cols, theta1, theta2, ScalarField(rows, cols)};
    for (int r = 0; r < rows; ++r)
        for (int q = 0; q < cols; ++q)
            d.values(r, q) = theta1 + theta2 * bilaplacian_symbol(q, r, cols, rows);
    return d;
}

struct SpectralSolver::Plans {
    std::size_t count = 0;
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Plans(int rows, int cols) : count(static_cast<std::size_t>(rows) * cols) {
        std::lock_guard lock(planner_mutex());
        buffer = fftw_alloc_complex(count);
        if (buffer == nullptr) throw std::bad_alloc();
        // FFTW_ESTIMATE keeps plan selection, and hence rounding, reproducible.
        forward = fftw_plan_dft_2d(rows, cols, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(rows, cols, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (forward == nullptr || backward == nullptr) {
            release();
            throw std::runtime_error("FFTW plan creation failed");
        }
    }

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        release();
    }

    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;

private:
    void release() noexcept {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
        forward = backward = nullptr;
        buffer = nullptr;
    }
};

SpectralSolver::SpectralSolver(int rows, int cols, double theta1, double theta2)
    : denom_(SpectralDenominator::build(rows, cols, theta1, theta2)) {
    plans_ = std::make_unique<Plans>(rows, cols);
}

SpectralSolver::~SpectralSolver() = default;
SpectralSolver::SpectralSolver(SpectralSolver&&) noexcept = default;
SpectralSolver& SpectralSolver::operator=(SpectralSolver&&) noexcept = default;

void SpectralSolver::set_weights(double theta1, double theta2) {
    if (!denom_.matches(denom_.rows, denom_.cols, theta1, theta2)) {
        denom_ = SpectralDenominator::build(denom_.rows, denom_.cols, theta1, theta2);
    }
}

ScalarField SpectralSolver::solve(const ScalarField& rhs) {
    if (rhs.rows() != denom_.rows || rhs.cols() != denom_.cols) {
        throw std::invalid_argument("spectral solve: dimension mismatch");
    }
    fftw_complex* buf = plans_->buffer;
    const std::size_t n = plans_->count;
    for (std::size_t k = 0; k < n; ++k) {
        buf[k][0] = rhs[k];
        buf[k][1] = 0.0;
    }
    fftw_execute(plans_->forward);
    const auto& den = denom_.values;
    for (std::size_t k = 0; k < n; ++k) {
        buf[k][0] /= den[k];
        buf[k][1] /= den[k];
    }
    fftw_execute(plans_->backward);

    const double scale = 1.0 / static_cast<double>(n);
    ScalarField u(rhs.rows(), rhs.cols());
    double imag = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = buf[k][0] * scale;
        imag = std::max(imag, std::abs(buf[k][1] * scale));
    }
    last_imag_ = imag;
    if (imag > kMaxImaginaryResidue) {
        throw std::runtime_error("spectral solve produced a non-real result");
    }
    return u;
}

ScalarField solve_u(const ScalarField& u_tilde, const ScalarField& s, const MatrixField& v,
                    const MatrixField& d, SpectralSolver& solver) {
    if (!u_tilde.same_shape(s) || !v.same_shape(u_tilde) || !d.same_shape(u_tilde)) {
        throw std::invalid_argument("solve_u: dimension mismatch");
    }
    ScalarField rhs = solver.theta1() * (u_tilde - s);
    rhs += solver.theta2() * div2(v - d);
    return solver.solve(rhs);
}

}  // namespace twso
