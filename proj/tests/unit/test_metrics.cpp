#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace twso;

namespace {

// Straightforward SSIM: for every window position sum the 11x11 Gaussian
// weights directly (no separable filtering).
double ssim_direct(const ScalarField& a, const ScalarField& b) {
    double w[11][11], tot = 0.0;
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) {
            w[y][x] = std::exp(-((y - 5) * (y - 5) + (x - 5) * (x - 5)) / (2 * 1.5 * 1.5));
            tot += w[y][x];
        }
    const double c1 = 1e-4, c2 = 9e-4;
    double acc = 0.0;
    int count = 0;
    for (int i = 0; i + 11 <= a.rows(); ++i)
        for (int j = 0; j + 11 <= a.cols(); ++j) {
            double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
            for (int y = 0; y < 11; ++y)
                for (int x = 0; x < 11; ++x) {
                    const double g = w[y][x] / tot, p = a(i + y, j + x), q = b(i + y, j + x);
                    ma += g * p;
                    mb += g * q;
                    saa += g * p * p;
                    sbb += g * q * q;
                    sab += g * p * q;
                }
            const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
            acc += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return acc / count;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("identical images") {
    const ScalarField a = make_shapes_fixture(32, 32);
    CHECK(mse(a, a) == 0.0);
    CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psnr from a constant offset") {
    const ScalarField a(16, 16, 0.5), b(16, 16, 0.6);
    CHECK(mse(a, b) == doctest::Approx(0.01));
    CHECK(psnr(a, b) == doctest::Approx(20.0));
}

TEST_CASE("ssim agrees with a direct windowed sum") {
    std::mt19937_64 rng(51);
    const ScalarField a = tsupport::random_field(20, 17, rng, 0, 1);
    const ScalarField b = add_gaussian_noise(a, 0.02, 3);
    CHECK(ssim(a, b) == doctest::Approx(ssim_direct(a, b)).epsilon(1e-12));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    const ScalarField c = make_shapes_fixture(32, 40);
    CHECK(ssim(c, clamp01(c + ScalarField(32, 40, 0.1))) ==
          doctest::Approx(ssim_direct(c, clamp01(c + ScalarField(32, 40, 0.1)))).epsilon(1e-12));
}

TEST_CASE("more noise scores lower") {
    const ScalarField a = make_shapes_fixture(48, 48);
    const ScalarField lo = add_gaussian_noise(a, 0.001, 1), hi = add_gaussian_noise(a, 0.02, 1);
    CHECK(psnr(lo, a) > psnr(hi, a));
    CHECK(ssim(lo, a) > ssim(hi, a));
    const MetricReport r = evaluate(lo, a);
    CHECK(r.psnr == psnr(lo, a));
    CHECK(r.ssim == ssim(lo, a));
    CHECK(r.mse == mse(lo, a));
}

TEST_CASE("input checks") {
    CHECK_THROWS_AS(mse(ScalarField(4, 4), ScalarField(4, 5)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(ScalarField(10, 30), ScalarField(10, 30)), std::invalid_argument);
}

}
