#pragma once

#include "twso/grid.hpp"

namespace twso {

struct MetricReport {
    double psnr = 0.0;  ///< dB; +infinity when mse == 0
    double ssim = 0.0;
    double mse = 0.0;
};

double mse(const ScalarField& test, const ScalarField& reference);

/// 10 log10(1 / MSE) for images on [0, 1]; +infinity for identical inputs.
double psnr(const ScalarField& test, const ScalarField& reference);

/// Mean SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// dynamic range 1, evaluated over every fully-contained window.
/// Both dimensions must be at least 11.
double ssim(const ScalarField& test, const ScalarField& reference);

MetricReport evaluate(const ScalarField& test, const ScalarField& reference);

}  // namespace twso
