#include "twso/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twso {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);

std::array<double, kWindow> window_weights() {
    std::array<double, kWindow> w{};
    double sum = 0.0;
    for (int t = 0; t < kWindow; ++t) {
        const double x = t - kWindow / 2;
        w[t] = std::exp(-0.5 * x * x / (kWindowSigma * kWindowSigma));
        sum += w[t];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable weighted sum over every fully-contained window ("valid" mode).
ScalarField filter_valid(const ScalarField& in, const std::array<double, kWindow>& w) {
    const int m = in.rows(), n = in.cols();
    const int om = m - kWindow + 1, on = n - kWindow + 1;
    ScalarField tmp(m, std::max(on, 2));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < on; ++j) {
            double acc = 0.0;
            for (int t = 0; t < kWindow; ++t) acc += w[t] * in(i, j + t);
            tmp(i, j) = acc;
        }
    ScalarField out(std::max(om, 2), std::max(on, 2));
    for (int i = 0; i < om; ++i)
        for (int j = 0; j < on; ++j) {
            double acc = 0.0;
            for (int t = 0; t < kWindow; ++t) acc += w[t] * tmp(i + t, j);
            out(i, j) = acc;
        }
    return out;
}

void check_shapes(const ScalarField& a, const ScalarField& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("metric inputs differ in dimensions");
}

}  // namespace

double mse(const ScalarField& test, const ScalarField& reference) {
    check_shapes(test, reference);
    double acc = 0.0;
    for (std::size_t k = 0; k < test.size(); ++k) {
        const double d = test[k] - reference[k];
        acc += d * d;
    }
    return acc / static_cast<double>(test.size());
}

double psnr(const ScalarField& test, const ScalarField& reference) {
    const double e = mse(test, reference);
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / e);
}

double ssim(const ScalarField& test, const ScalarField& reference) {
    check_shapes(test, reference);
    if (test.rows() < kWindow || test.cols() < kWindow) {
        throw std::invalid_argument("SSIM needs images of at least 11x11");
    }
    const auto w = window_weights();
    const int m = test.rows(), n = test.cols();
    ScalarField aa(m, n), bb(m, n), ab(m, n);
    for (std::size_t k = 0; k < test.size(); ++k) {
        aa[k] = test[k] * test[k];
        bb[k] = reference[k] * reference[k];
        ab[k] = test[k] * reference[k];
    }
    const ScalarField mu_a = filter_valid(test, w);
    const ScalarField mu_b = filter_valid(reference, w);
    const ScalarField e_aa = filter_valid(aa, w);
    const ScalarField e_bb = filter_valid(bb, w);
    const ScalarField e_ab = filter_valid(ab, w);

    const int om = m - kWindow + 1, on = n - kWindow + 1;
    double acc = 0.0;
    for (int i = 0; i < om; ++i)
        for (int j = 0; j < on; ++j) {
            const double ma = mu_a(i, j), mb = mu_b(i, j);
            const double va = e_aa(i, j) - ma * ma;
            const double vb = e_bb(i, j) - mb * mb;
            const double cov = e_ab(i, j) - ma * mb;
            acc += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
                   ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
        }
    return acc / (static_cast<double>(om) * on);
}

MetricReport evaluate(const ScalarField& test, const ScalarField& reference) {
    return {psnr(test, reference), ssim(test, reference), mse(test, reference)};
}

}  // namespace twso
