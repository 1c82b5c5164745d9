#include "twso/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twso {

namespace {

// Below this eigenvalue gap the tensor is treated as isotropic.
constexpr double kIsotropicGap = 1e-12;

// Constant and exponent of the edge-stopping eigenvalue law.
constexpr double kEdgeConstant = 3.31488;

void convolve_rows(const ScalarField& in, ScalarField& out, const std::vector<double>& k) {
    const int m = in.rows(), n = in.cols();
    const int radius = static_cast<int>(k.size() / 2);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                acc += k[t + radius] * in(i, std::clamp(j + t, 0, n - 1));
            }
            out(i, j) = acc;
        }
    }
}

void convolve_cols(const ScalarField& in, ScalarField& out, const std::vector<double>& k) {
    const int m = in.rows(), n = in.cols();
    const int radius = static_cast<int>(k.size() / 2);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                acc += k[t + radius] * in(std::clamp(i + t, 0, m - 1), j);
            }
            out(i, j) = acc;
        }
    }
}

}  // namespace

void TensorParams::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be >= 0");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be >= 0");
    if (!(contrast > 0.0) || !std::isfinite(contrast)) {
        throw std::invalid_argument("contrast must be > 0");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
}

DiffusionTensorField DiffusionTensorField::identity(int rows, int cols) {
    return {ScalarField(rows, cols, 1.0), ScalarField(rows, cols, 0.0), ScalarField(rows, cols, 1.0)};
}

std::vector<double> gaussian_kernel(double std_dev) {
    if (!(std_dev >= 0.0)) throw std::invalid_argument("standard deviation must be >= 0");
    if (std_dev == 0.0) return {1.0};
    const int radius = static_cast<int>(std::ceil(3.0 * std_dev));
    std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double w = std::exp(-0.5 * t * t / (std_dev * std_dev));
        k[t + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

ScalarField gaussian_smooth(const ScalarField& u, double std_dev) {
    const auto k = gaussian_kernel(std_dev);
    if (k.size() == 1) return u;
    ScalarField tmp(u.rows(), u.cols());
    ScalarField out(u.rows(), u.cols());
    convolve_rows(u, tmp, k);
    convolve_cols(tmp, out, k);
    return out;
}

StructureTensorField structure_tensor(const ScalarField& u, const TensorParams& params) {
    const Gradient g = gradient_central(gaussian_smooth(u, params.sigma));
    const int m = u.rows(), n = u.cols();
    StructureTensorField j{ScalarField(m, n), ScalarField(m, n), ScalarField(m, n)};
    for (std::size_t k = 0; k < u.size(); ++k) {
        j.j11[k] = g.x[k] * g.x[k];
        j.j12[k] = g.x[k] * g.y[k];
        j.j22[k] = g.y[k] * g.y[k];
    }
    j.j11 = gaussian_smooth(j.j11, params.rho);
    j.j12 = gaussian_smooth(j.j12, params.rho);
    j.j22 = gaussian_smooth(j.j22, params.rho);
    return j;
}

ScalarField smoothed_gradient_magnitude(const ScalarField& u, double sigma) {
    const Gradient g = gradient_central(gaussian_smooth(u, sigma));
    ScalarField s(u.rows(), u.cols());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::hypot(g.x[k], g.y[k]);
    return s;
}

EigenField eigen_decompose(const StructureTensorField& j) {
    const int m = j.j11.rows(), n = j.j11.cols();
    EigenField e{ScalarField(m, n), ScalarField(m, n), ScalarField(m, n), ScalarField(m, n),
                 ScalarField(m, n)};
    for (std::size_t k = 0; k < j.j11.size(); ++k) {
        const double a = j.j11[k], b = j.j12[k], c = j.j22[k];
        const double diff = a - c;
        const double coh = diff * diff + 4.0 * b * b;
        const double gap = std::sqrt(coh);
        e.mu1[k] = 0.5 * (a + c + gap);
        e.mu2[k] = 0.5 * (a + c - gap);
        e.coh[k] = coh;

        double vx = 1.0, vy = 0.0;
        if (gap > kIsotropicGap) {
            // (mu1 - j22, j12) and (j12, mu1 - j11) are both eigenvectors for
            // mu1; pick the one whose leading term does not cancel.
            if (diff >= 0.0) {
                vx = 0.5 * (diff + gap);
                vy = b;
            } else {
                vx = b;
                vy = 0.5 * (gap - diff);
            }
            const double len = std::hypot(vx, vy);
            vx /= len;
            vy /= len;
        }
        e.v1x[k] = vx;
        e.v1y[k] = vy;
    }
    return e;
}

EigenvaluePair edge_eigenvalues(const ScalarField& grad_mag, double contrast) {
    if (!(contrast > 0.0)) throw std::invalid_argument("contrast must be > 0");
    EigenvaluePair out{ScalarField(grad_mag.rows(), grad_mag.cols(), 1.0),
                       ScalarField(grad_mag.rows(), grad_mag.cols(), 1.0)};
    for (std::size_t k = 0; k < grad_mag.size(); ++k) {
        const double s = grad_mag[k];
        if (s <= 0.0) continue;
        const double ratio = s / contrast;
        // 1 - exp(-x) via expm1 keeps tiny values positive instead of rounding to 0.
        const double x = kEdgeConstant / std::pow(ratio, 8);
        out.lambda1[k] = std::max(-std::expm1(-x), std::numeric_limits<double>::min());
    }
    return out;
}

EigenvaluePair coherence_eigenvalues(const EigenField& eig, double gamma, double contrast) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (!(contrast > 0.0)) throw std::invalid_argument("contrast must be > 0");
    const int m = eig.mu1.rows(), n = eig.mu1.cols();
    EigenvaluePair out{ScalarField(m, n, gamma), ScalarField(m, n, gamma)};
    for (std::size_t k = 0; k < eig.mu1.size(); ++k) {
        if (std::abs(eig.mu1[k] - eig.mu2[k]) <= kIsotropicGap) continue;
        out.lambda2[k] = gamma + (1.0 - gamma) * std::exp(-contrast / eig.coh[k]);
    }
    return out;
}

DiffusionTensorField assemble_tensor(const EigenField& eig, const EigenvaluePair& lambdas) {
    const int m = eig.mu1.rows(), n = eig.mu1.cols();
    DiffusionTensorField t{ScalarField(m, n), ScalarField(m, n), ScalarField(m, n)};
    for (std::size_t k = 0; k < eig.mu1.size(); ++k) {
        const double l1 = lambdas.lambda1[k], l2 = lambdas.lambda2[k];
        const double ax = eig.v1x[k], ay = eig.v1y[k];
        const double bx = eig.v2x(k), by = eig.v2y(k);
        t.t11[k] = l1 * ax * ax + l2 * bx * bx;
        t.t12[k] = l1 * ax * ay + l2 * bx * by;
        t.t22[k] = l1 * ay * ay + l2 * by * by;
    }
    return t;
}

DiffusionTensorField build_diffusion_tensor(const ScalarField& u, const TensorParams& params) {
    params.validate();
    const EigenField eig = eigen_decompose(structure_tensor(u, params));
    if (params.mode == TensorMode::edge) {
        const ScalarField s = smoothed_gradient_magnitude(u, params.sigma);
        return assemble_tensor(eig, edge_eigenvalues(s, params.contrast));
    }
    return assemble_tensor(eig, coherence_eigenvalues(eig, params.gamma, params.contrast));
}

namespace {

// K * (w u) / K * w, zero where no weight reaches.
ScalarField normalized_smooth(const ScalarField& u, const ScalarField& weight, double std_dev,
                              ScalarField* reach = nullptr) {
    ScalarField wu(u.rows(), u.cols());
    for (std::size_t k = 0; k < u.size(); ++k) wu[k] = weight[k] * u[k];
    const ScalarField num = gaussian_smooth(wu, std_dev);
    const ScalarField den = gaussian_smooth(weight, std_dev);
    ScalarField out(u.rows(), u.cols());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = den[k] > 0.0 ? num[k] / den[k] : 0.0;
    if (reach) *reach = den;
    return out;
}

struct MaskedGradient {
    Gradient grad;
    ScalarField valid;  // 1 where the stencil touches known pixels only
};

MaskedGradient masked_gradient(const ScalarField& u, const MaskField& known, double sigma) {
    const int m = u.rows(), n = u.cols();
    ScalarField weight(m, n);
    for (std::size_t k = 0; k < u.size(); ++k) weight[k] = known.known(k) ? 1.0 : 0.0;
    MaskedGradient out{gradient_central(normalized_smooth(u, weight, sigma)), ScalarField(m, n)};
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const bool ok = known.known(i, j) && known.known(wrap_index(i - 1, m), j) &&
                            known.known(wrap_index(i + 1, m), j) &&
                            known.known(i, wrap_index(j - 1, n)) &&
                            known.known(i, wrap_index(j + 1, n));
            out.valid(i, j) = ok ? 1.0 : 0.0;
        }
    return out;
}

}  // namespace

StructureTensorField structure_tensor(const ScalarField& u, const MaskField& known,
                                      const TensorParams& params) {
    if (!known.matches(u)) throw std::invalid_argument("mask and image dimensions differ");
    if (known.all_known()) return structure_tensor(u, params);
    const MaskedGradient mg = masked_gradient(u, known, params.sigma);
    const int m = u.rows(), n = u.cols();
    StructureTensorField j{ScalarField(m, n), ScalarField(m, n), ScalarField(m, n)};
    for (std::size_t k = 0; k < u.size(); ++k) {
        j.j11[k] = mg.grad.x[k] * mg.grad.x[k];
        j.j12[k] = mg.grad.x[k] * mg.grad.y[k];
        j.j22[k] = mg.grad.y[k] * mg.grad.y[k];
    }
    j.j11 = normalized_smooth(j.j11, mg.valid, params.rho);
    j.j12 = normalized_smooth(j.j12, mg.valid, params.rho);
    j.j22 = normalized_smooth(j.j22, mg.valid, params.rho);
    return j;
}

DiffusionTensorField build_diffusion_tensor(const ScalarField& u, const MaskField& known,
                                            const TensorParams& params) {
    if (!known.matches(u)) throw std::invalid_argument("mask and image dimensions differ");
    if (known.all_known()) return build_diffusion_tensor(u, params);
    params.validate();
    const EigenField eig = eigen_decompose(structure_tensor(u, known, params));
    if (params.mode == TensorMode::edge) {
        const MaskedGradient mg = masked_gradient(u, known, params.sigma);
        ScalarField s(u.rows(), u.cols());
        for (std::size_t k = 0; k < s.size(); ++k) {
            s[k] = mg.valid[k] * std::hypot(mg.grad.x[k], mg.grad.y[k]);
        }
        return assemble_tensor(eig, edge_eigenvalues(s, params.contrast));
    }
    return assemble_tensor(eig, coherence_eigenvalues(eig, params.gamma, params.contrast));
}

MatrixField tensor_product(const DiffusionTensorField& t, const MatrixField& m) {
    MatrixField out(m.rows(), m.cols());
    for (std::size_t k = 0; k < m.a11.size(); ++k) {
        const double t11 = t.t11[k], t12 = t.t12[k], t22 = t.t22[k];
        out.a11[k] = t11 * m.a11[k] + t12 * m.a21[k];
        out.a21[k] = t12 * m.a11[k] + t22 * m.a21[k];
        out.a12[k] = t11 * m.a12[k] + t12 * m.a22[k];
        out.a22[k] = t12 * m.a12[k] + t22 * m.a22[k];
    }
    return out;
}

}  // namespace twso
