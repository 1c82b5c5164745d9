#pragma once

#include "twso/diffops.hpp"
#include "twso/grid.hpp"

namespace twso {

/// Which eigenvalue remapping drives the diffusion tensor.
enum class TensorMode {
    edge,       ///< edge-preserving: suppress smoothing across strong gradients (denoising)
    coherence,  ///< coherence-enhancing: smooth along isophotes (inpainting)
};

struct TensorParams {
    double sigma = 1.0;      ///< pre-smoothing std-dev in pixels
    double rho = 2.0;        ///< tensor averaging std-dev in pixels
    double contrast = 0.05;  ///< C; edge contrast or coherence threshold
    double gamma = 0.01;     ///< floor eigenvalue for coherence mode, in (0, 1)
    TensorMode mode = TensorMode::edge;

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
};

/// Symmetric structure tensor [[j11, j12], [j12, j22]] per pixel.
struct StructureTensorField {
    ScalarField j11, j12, j22;
};

/// Pixelwise eigen-analysis of a structure tensor. v2 is v1 rotated by +90
/// degrees, so only v1 is stored.
struct EigenField {
    ScalarField mu1, mu2;  ///< mu1 >= mu2
    ScalarField v1x, v1y;  ///< unit eigenvector for mu1
    ScalarField coh;       ///< (mu1 - mu2)^2

    [[nodiscard]] double v2x(std::size_t k) const noexcept { return -v1y[k]; }
    [[nodiscard]] double v2y(std::size_t k) const noexcept { return v1x[k]; }
};

/// Symmetric PSD diffusion tensor T, T21 == T12.
struct DiffusionTensorField {
    ScalarField t11, t12, t22;

    /// T = I at every pixel.
    static DiffusionTensorField identity(int rows, int cols);
};

struct EigenvaluePair {
    ScalarField lambda1;  ///< attached to v1 (gradient direction)
    ScalarField lambda2;  ///< attached to v2 (isophote direction)
};

/// Separable Gaussian blur; radius ceil(3*std), normalized kernel, clamped
/// (replicate) borders. std == 0 returns the input.
ScalarField gaussian_smooth(const ScalarField& u, double std_dev);

/// Normalized 1-D Gaussian kernel of radius ceil(3*std), centre at index radius.
std::vector<double> gaussian_kernel(double std_dev);

/// K_rho * (grad u_sigma outer grad u_sigma), gradients by central differences.
StructureTensorField structure_tensor(const ScalarField& u, const TensorParams& params);

/// |grad u_sigma| with the same smoothing and stencil as structure_tensor.
ScalarField smoothed_gradient_magnitude(const ScalarField& u, double sigma);

/// Closed-form symmetric 2x2 eigen-decomposition. Pixels with
/// |mu1 - mu2| <= 1e-12 get v1 = (1, 0).
EigenField eigen_decompose(const StructureTensorField& j);

/// lambda1 = 1 - exp(-3.31488 / (s/C)^8) (1 where s <= 0), lambda2 = 1.
EigenvaluePair edge_eigenvalues(const ScalarField& grad_mag, double contrast);

/// lambda1 = gamma, lambda2 = gamma + (1 - gamma) exp(-C / coh) off the
/// isotropic set, gamma on it.
EigenvaluePair coherence_eigenvalues(const EigenField& eig, double gamma, double contrast);

/// T = lambda1 v1 v1^T + lambda2 v2 v2^T.
DiffusionTensorField assemble_tensor(const EigenField& eig, const EigenvaluePair& lambdas);

/// Full pipeline: structure tensor, eigen-analysis, remapping by params.mode.
DiffusionTensorField build_diffusion_tensor(const ScalarField& u, const TensorParams& params);

/// Structure tensor from known samples only. Smoothing and averaging are
/// normalized Gaussian convolutions restricted to known pixels, and gradient
/// products are used only where the central-difference stencil is fully
/// known. Pixels no averaging window reaches get a zero tensor.
StructureTensorField structure_tensor(const ScalarField& u, const MaskField& known,
                                      const TensorParams& params);

/// build_diffusion_tensor on known samples only; with an all-known mask it
/// equals the unmasked pipeline.
DiffusionTensorField build_diffusion_tensor(const ScalarField& u, const MaskField& known,
                                            const TensorParams& params);

/// T * M per pixel (ordinary 2x2 matrix product).
MatrixField tensor_product(const DiffusionTensorField& t, const MatrixField& m);

}  // namespace twso
