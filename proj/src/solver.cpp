#include "twso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twso {

namespace {

constexpr double kChangeFloor = 1e-12;

// Applies the multiplier updates in place and returns the three constraint
// residual norms (split, hessian, tensor).
IterationRecord apply_multiplier_update(AdmmState& st, const MatrixField& hess_u,
                                        const MatrixField& tv) {
    IterationRecord rec;
    const ScalarField split = st.u - st.u_tilde;
    const MatrixField hess_gap = hess_u - st.v;
    const MatrixField tensor_gap = tv - st.w;
    st.s += split;
    st.d += hess_gap;
    st.b += tensor_gap;
    rec.split_residual = norm2(split);
    rec.hessian_residual = norm2(hess_gap);
    rec.tensor_residual = norm2(tensor_gap);
    return rec;
}

void check_tensor_shape(const DiffusionTensorField& t, const ScalarField& f) {
    if (!t.t11.same_shape(f) || !t.t12.same_shape(f) || !t.t22.same_shape(f)) {
        throw std::invalid_argument("diffusion tensor does not match image dimensions");
    }
}

}  // namespace

SolverParams SolverParams::denoise_defaults() {
    SolverParams p;
    p.eta = 20.0;
    p.p = 2;
    p.tensor.mode = TensorMode::edge;
    p.tensor.contrast = 0.05;
    p.theta1 = 10.0;
    p.theta2 = 10.0;
    p.theta3 = 100.0;
    return p;
}

SolverParams SolverParams::impulse_defaults() {
    SolverParams p = denoise_defaults();
    p.p = 1;
    p.eta = 1.5;
    return p;
}

SolverParams SolverParams::inpaint_defaults() {
    SolverParams p;
    p.eta = 1000.0;
    p.p = 2;
    p.refine_every = 10;
    // small gamma makes the W/V coupling stiff; a large theta3 keeps ADMM moving
    p.theta1 = 0.4;
    p.theta2 = 1.5;
    p.theta3 = 5000.0;
    p.tensor.mode = TensorMode::coherence;
    p.tensor.contrast = 1e-4;
    p.tensor.gamma = 0.01;
    return p;
}

void SolverParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(name) + " must be a finite positive number");
        }
    };
    positive(eta, "eta");
    positive(theta1, "theta1");
    positive(theta2, "theta2");
    positive(theta3, "theta3");
    positive(tol, "tol");
    if (p != 1 && p != 2) throw std::invalid_argument("p must be 1 or 2");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (refine_every < 0) throw std::invalid_argument("refine_every must be >= 0");
    tensor.validate();
}

Problem Problem::denoise(ScalarField f) {
    MaskField mask(f.rows(), f.cols(), true);
    return {std::move(f), std::move(mask), Task::denoise};
}

Problem Problem::inpaint(ScalarField f, MaskField mask) {
    return {std::move(f), std::move(mask), Task::inpaint};
}

void Problem::validate() const {
    if (!mask.matches(f)) throw std::invalid_argument("mask and image dimensions differ");
    if (task == Task::denoise && !mask.all_known()) {
        throw std::invalid_argument("denoising requires every pixel to be known");
    }
    if (!f.all_finite()) throw std::invalid_argument("observed image contains non-finite values");
}

ScalarField solve_u_tilde(const ScalarField& f, const ScalarField& u, const ScalarField& s,
                          const MaskField& mask, double eta, double theta1, int p) {
    if (!f.same_shape(u) || !f.same_shape(s) || !mask.matches(f)) {
        throw std::invalid_argument("solve_u_tilde: dimension mismatch");
    }
    ScalarField out(f.rows(), f.cols());
    if (p == 2) {
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double w = mask.known(k) ? eta : 0.0;
            out[k] = (w * f[k] + theta1 * (u[k] + s[k])) / (w + theta1);
        }
    } else if (p == 1) {
        const double thresh = eta / theta1;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double psi = u[k] + s[k] - f[k];
            const double t = mask.known(k) ? thresh : 0.0;
            const double mag = std::max(std::abs(psi) - t, 0.0);
            out[k] = f[k] + std::copysign(mag, psi);
        }
    } else {
        throw std::invalid_argument("p must be 1 or 2");
    }
    return out;
}

MatrixField solve_w(const MatrixField& tv, const MatrixField& b, double theta3) {
    MatrixField w(tv.rows(), tv.cols());
    const double thresh = 1.0 / theta3;
    for (std::size_t k = 0; k < tv.a11.size(); ++k) {
        const double a11 = tv.a11[k] + b.a11[k];
        const double a21 = tv.a21[k] + b.a21[k];
        const double a12 = tv.a12[k] + b.a12[k];
        const double a22 = tv.a22[k] + b.a22[k];
        const double mag = std::sqrt(a11 * a11 + a21 * a21 + a12 * a12 + a22 * a22);
        if (mag <= thresh) continue;  // also covers mag == 0 (0 * 0/0 = 0)
        const double scale = (mag - thresh) / mag;
        w.a11[k] = scale * a11;
        w.a21[k] = scale * a21;
        w.a12[k] = scale * a12;
        w.a22[k] = scale * a22;
    }
    return w;
}

double v_system_determinant(double t11, double t12, double t22, double theta2, double theta3) {
    const double r11 = theta3 * (t11 * t11 + t12 * t12) + theta2;
    const double r12 = theta3 * (t11 * t12 + t12 * t22);
    const double r22 = theta3 * (t12 * t12 + t22 * t22) + theta2;
    return r11 * r22 - r12 * r12;
}

MatrixField solve_v(const MatrixField& hess_u, const MatrixField& d, const MatrixField& w,
                    const MatrixField& b, const DiffusionTensorField& t, double theta2,
                    double theta3) {
    MatrixField v(hess_u.rows(), hess_u.cols());
    for (std::size_t k = 0; k < hess_u.a11.size(); ++k) {
        const double t11 = t.t11[k], t12 = t.t12[k], t21 = t12, t22 = t.t22[k];
        const double r11 = theta3 * (t11 * t11 + t21 * t21) + theta2;
        const double r12 = theta3 * (t11 * t12 + t21 * t22);
        const double r22 = theta3 * (t12 * t12 + t22 * t22) + theta2;
        const double det = r11 * r22 - r12 * r12;

        const double q11 = b.a11[k] - w.a11[k];
        const double q21 = b.a21[k] - w.a21[k];
        const double q12 = b.a12[k] - w.a12[k];
        const double q22 = b.a22[k] - w.a22[k];

        // First column (V11, V21).
        const double e1 = theta2 * (hess_u.a11[k] + d.a11[k]) - theta3 * (t11 * q11 + t21 * q21);
        const double e2 = theta2 * (hess_u.a21[k] + d.a21[k]) - theta3 * (t12 * q11 + t22 * q21);
        v.a11[k] = (r22 * e1 - r12 * e2) / det;
        v.a21[k] = (r11 * e2 - r12 * e1) / det;

        // Second column (V12, V22).
        const double e3 = theta2 * (hess_u.a12[k] + d.a12[k]) - theta3 * (t11 * q12 + t21 * q22);
        const double e4 = theta2 * (hess_u.a22[k] + d.a22[k]) - theta3 * (t12 * q12 + t22 * q22);
        v.a12[k] = (r22 * e3 - r12 * e4) / det;
        v.a22[k] = (r11 * e4 - r12 * e3) / det;
    }
    return v;
}

AdmmState update_multipliers(AdmmState state) {
    const MatrixField hess_u = hessian(state.u);
    const MatrixField tv = tensor_product(state.t, state.v);
    apply_multiplier_update(state, hess_u, tv);
    return state;
}

double augmented_lagrangian(const AdmmState& st, const Problem& problem,
                            const SolverParams& params) {
    double fidelity = 0.0;
    for (std::size_t k = 0; k < problem.f.size(); ++k) {
        if (!problem.mask.known(k)) continue;
        const double r = std::abs(st.u_tilde[k] - problem.f[k]);
        fidelity += params.p == 2 ? r * r : r;
    }
    fidelity *= params.eta / params.p;

    double reg = 0.0;
    for (std::size_t k = 0; k < st.w.a11.size(); ++k) {
        reg += std::sqrt(st.w.a11[k] * st.w.a11[k] + st.w.a21[k] * st.w.a21[k] +
                         st.w.a12[k] * st.w.a12[k] + st.w.a22[k] * st.w.a22[k]);
    }

    const ScalarField split = st.u_tilde - st.u - st.s;
    const MatrixField hess_gap = st.v - hessian(st.u) - st.d;
    const MatrixField tensor_gap = st.w - tensor_product(st.t, st.v) - st.b;
    return fidelity + reg + 0.5 * params.theta1 * inner(split, split) +
           0.5 * params.theta2 * inner(hess_gap, hess_gap) +
           0.5 * params.theta3 * inner(tensor_gap, tensor_gap);
}

AdmmSolver::AdmmSolver(ScalarField f, MaskField mask, const SolverParams& params,
                       DiffusionTensorField t)
    : f_(std::move(f)),
      mask_(std::move(mask)),
      params_(params),
      spectral_(f_.rows(), f_.cols(), params.theta1, params.theta2) {
    params_.validate();
    if (!mask_.matches(f_)) throw std::invalid_argument("mask and image dimensions differ");
    check_tensor_shape(t, f_);
    const int m = f_.rows(), n = f_.cols();
    state_.u = f_;
    state_.u_tilde = f_;
    state_.s = ScalarField(m, n);
    state_.w = MatrixField(m, n);
    state_.v = MatrixField(m, n);
    state_.d = MatrixField(m, n);
    state_.b = MatrixField(m, n);
    state_.t = std::move(t);
}

void AdmmSolver::set_tensor(DiffusionTensorField t) {
    check_tensor_shape(t, f_);
    state_.t = std::move(t);
}

const IterationRecord& AdmmSolver::step() {
    AdmmState& st = state_;
    const SolverParams& p = params_;

    st.u_tilde = solve_u_tilde(f_, st.u, st.s, mask_, p.eta, p.theta1, p.p);

    ScalarField u_next = solve_u(st.u_tilde, st.s, st.v, st.d, spectral_);
#ifndef NDEBUG
    {
        ScalarField rhs = p.theta1 * (st.u_tilde - st.s);
        rhs += p.theta2 * div2(st.v - st.d);
        ScalarField lhs = p.theta1 * u_next;
        lhs += p.theta2 * div2(hessian(u_next));
        double scale = 1.0;
        for (double x : rhs.values()) scale = std::max(scale, std::abs(x));
        if (max_abs_diff(lhs, rhs) > 1e-8 * scale) {
            throw std::logic_error("spectral u-solve residual above tolerance");
        }
    }
#endif
    const double change = norm2(u_next - st.u) / std::max(norm2(st.u), kChangeFloor);
    st.u = std::move(u_next);

    // W uses the previous V; V then uses the fresh W.
    st.w = solve_w(tensor_product(st.t, st.v), st.b, p.theta3);
    const MatrixField hess_u = hessian(st.u);
    st.v = solve_v(hess_u, st.d, st.w, st.b, st.t, p.theta2, p.theta3);

    IterationRecord rec = apply_multiplier_update(st, hess_u, tensor_product(st.t, st.v));
    rec.iteration = ++st.iteration;
    rec.relative_change = change;
    st.history.push_back(rec);
    return st.history.back();
}

SolveResult run_channels(const Channels& f, const MaskField& mask, Task task,
                         const SolverParams& params, bool identity_tensor,
                         const IterationCallback& on_iteration) {
    params.validate();
    if (f.empty()) throw std::invalid_argument("no image channels");
    for (const auto& ch : f) {
        Problem{ch, mask, task}.validate();
        if (!ch.same_shape(f.front())) throw std::invalid_argument("channel dimensions differ");
    }

    const int m = f.front().rows(), n = f.front().cols();
    auto current_tensor = [&](const Channels& src) {
        return identity_tensor ? DiffusionTensorField::identity(m, n)
                               : build_diffusion_tensor(luminance(src), params.tensor);
    };

    // f carries no information on the missing set, so the initial tensor
    // only looks at known samples. Refinements use the full current u.
    const DiffusionTensorField t0 =
        identity_tensor ? DiffusionTensorField::identity(m, n)
                        : build_diffusion_tensor(luminance(f), mask, params.tensor);
    std::vector<AdmmSolver> solvers;
    solvers.reserve(f.size());
    for (const auto& ch : f) solvers.emplace_back(ch, mask, params, t0);

    const bool refine = !identity_tensor && task == Task::inpaint && params.refine_every > 0;

    SolveResult result;
    for (int it = 1; it <= params.max_iter; ++it) {
        IterationRecord agg;
        agg.iteration = it;
        for (auto& s : solvers) {
            const IterationRecord& r = s.step();
            agg.hessian_residual = std::max(agg.hessian_residual, r.hessian_residual);
            agg.tensor_residual = std::max(agg.tensor_residual, r.tensor_residual);
            agg.split_residual = std::max(agg.split_residual, r.split_residual);
            agg.relative_change = std::max(agg.relative_change, r.relative_change);
        }
        result.history.push_back(agg);
        result.iterations = it;
        if (on_iteration) on_iteration(agg);
        if (agg.relative_change < params.tol) {
            result.converged = true;
            break;
        }
        if (refine && it % params.refine_every == 0) {
            Channels current;
            current.reserve(solvers.size());
            for (const auto& s : solvers) current.push_back(s.state().u);
            const DiffusionTensorField t = current_tensor(current);
            for (auto& s : solvers) s.set_tensor(t);
        }
    }

    result.channels.reserve(solvers.size());
    for (const auto& s : solvers) result.channels.push_back(clamp01(s.state().u));
    return result;
}

SolveResult run(const Problem& problem, const SolverParams& params,
                const IterationCallback& on_iteration) {
    return run_channels(Channels{problem.f}, problem.mask, problem.task, params, false,
                        on_iteration);
}

SolveResult run_sotv(const Problem& problem, const SolverParams& params,
                     const IterationCallback& on_iteration) {
    return run_channels(Channels{problem.f}, problem.mask, problem.task, params, true,
                        on_iteration);
}

}  // namespace twso
