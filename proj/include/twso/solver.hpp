#pragma once

#include <functional>
#include <vector>

#include "twso/diffops.hpp"
#include "twso/grid.hpp"
#include "twso/spectral.hpp"
#include "twso/tensor.hpp"

namespace twso {

enum class Task { denoise, inpaint };

/// Scalars of the model and of its ADMM splitting.
struct SolverParams {
    double eta = 20.0;  ///< fidelity weight
    int p = 2;          ///< fidelity exponent, 1 or 2
    double theta1 = 10.0;
    double theta2 = 1.0;
    double theta3 = 1.0;
    int max_iter = 300;
    double tol = 1e-5;     ///< relative change of u that stops the loop
    int refine_every = 10; ///< tensor rebuild period for inpainting, 0 = never
    TensorParams tensor;

    /// Gaussian-noise denoising: p = 2, edge-mode tensor.
    static SolverParams denoise_defaults();
    /// Impulse-noise denoising: p = 1, edge-mode tensor.
    static SolverParams impulse_defaults();
    /// Inpainting: p = 2, large eta, coherence-mode tensor with refinement.
    static SolverParams inpaint_defaults();
    static SolverParams defaults_for(Task task) {
        return task == Task::denoise ? denoise_defaults() : inpaint_defaults();
    }

    void validate() const;
};

/// Observed image, fidelity region and task. For denoising every pixel is known.
struct Problem {
    ScalarField f;
    MaskField mask;
    Task task = Task::denoise;

    static Problem denoise(ScalarField f);
    static Problem inpaint(ScalarField f, MaskField mask);

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double hessian_residual = 0.0;  ///< ||hessian(u) - V||
    double tensor_residual = 0.0;   ///< ||T V - W||
    double split_residual = 0.0;    ///< ||u - u_tilde||
    double relative_change = 0.0;   ///< ||u_k+1 - u_k|| / max(||u_k||, 1e-12)
};

struct AdmmState {
    ScalarField u, u_tilde, s;
    MatrixField w, v, d, b;
    DiffusionTensorField t;
    int iteration = 0;
    std::vector<IterationRecord> history;
};

struct SolveResult {
    Channels channels;  ///< restored image, clamped to [0, 1]
    std::vector<IterationRecord> history;
    int iterations = 0;
    bool converged = false;  ///< relative-change test fired before max_iter

    [[nodiscard]] const ScalarField& image() const { return channels.front(); }
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Pixelwise minimiser of eta/p |1_known (u~ - f)|^p + theta1/2 |u~ - u - s|^2.
ScalarField solve_u_tilde(const ScalarField& f, const ScalarField& u, const ScalarField& s,
                          const MaskField& mask, double eta, double theta1, int p);

/// Frobenius shrinkage of A = TV + b: max(|A| - 1/theta3, 0) A / |A|, 0 where A = 0.
MatrixField solve_w(const MatrixField& tv, const MatrixField& b, double theta3);

/// Per-pixel 2x2 normal equations (theta2 I + theta3 T^T T) V =
/// theta2 (hess_u + d) - theta3 T^T (b - W), solved by Cramer's rule.
MatrixField solve_v(const MatrixField& hess_u, const MatrixField& d, const MatrixField& w,
                    const MatrixField& b, const DiffusionTensorField& t, double theta2,
                    double theta3);

/// det(theta2 I + theta3 T^T T) for a symmetric T; at least theta2^2.
double v_system_determinant(double t11, double t12, double t22, double theta2, double theta3);

/// s += u - u~, d += hessian(u) - V, b += T V - W.
AdmmState update_multipliers(AdmmState state);

/// Augmented Lagrangian of the split problem at the current iterate.
double augmented_lagrangian(const AdmmState& state, const Problem& problem,
                            const SolverParams& params);

/// One single-channel ADMM instance. Owns its spectral solver.
class AdmmSolver {
public:
    AdmmSolver(ScalarField f, MaskField mask, const SolverParams& params, DiffusionTensorField t);

    /// One sweep: u~, u, W, V, then the three multiplier updates.
    const IterationRecord& step();

    void set_tensor(DiffusionTensorField t);

    [[nodiscard]] const AdmmState& state() const noexcept { return state_; }
    [[nodiscard]] const ScalarField& observed() const noexcept { return f_; }

private:
    ScalarField f_;
    MaskField mask_;
    SolverParams params_;
    SpectralSolver spectral_;
    AdmmState state_;
};

/// Restores a grayscale image. The tensor is built from f with params.tensor
/// and rebuilt from u every refine_every iterations when inpainting.
SolveResult run(const Problem& problem, const SolverParams& params,
                const IterationCallback& on_iteration = {});

/// Same loop with T fixed to the identity (plain second-order TV).
SolveResult run_sotv(const Problem& problem, const SolverParams& params,
                     const IterationCallback& on_iteration = {});

/// Channel-wise restoration sharing one tensor built from the luminance.
/// The loop stops when every channel meets the relative-change test.
SolveResult run_channels(const Channels& f, const MaskField& mask, Task task,
                         const SolverParams& params, bool identity_tensor = false,
                         const IterationCallback& on_iteration = {});

}  // namespace twso
