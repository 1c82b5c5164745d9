#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twso/twso.hpp"

namespace py = pybind11;
using namespace twso;

namespace {

using InArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using InMask = py::array_t<bool, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const InArray& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto rows = static_cast<int>(a.shape(0)), cols = static_cast<int>(a.shape(1));
    return ScalarField(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_array(const ScalarField& f) {
    py::array_t<double> out({f.rows(), f.cols()});
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

MaskField to_mask(const InMask& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D boolean array");
    std::vector<std::uint8_t> k(a.data(), a.data() + a.size());
    return MaskField(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), std::move(k));
}

py::array_t<bool> to_bool(const MaskField& m) {
    py::array_t<bool> out({m.rows(), m.cols()});
    bool* p = out.mutable_data();
    for (std::size_t k = 0; k < m.size(); ++k) p[k] = m.known(k);
    return out;
}

// (4, M, N) stack in the order a11, a21, a12, a22
py::array_t<double> stack(const MatrixField& m) {
    const int rows = m.a11.rows(), cols = m.a11.cols();
    py::array_t<double> out({4, rows, cols});
    double* p = out.mutable_data();
    for (const ScalarField* f : {&m.a11, &m.a21, &m.a12, &m.a22}) {
        p = std::copy(f->values().begin(), f->values().end(), p);
    }
    return out;
}

MatrixField unstack(const InArray& a) {
    if (a.ndim() != 3 || a.shape(0) != 4) throw py::value_error("expected a (4, M, N) array");
    const int rows = static_cast<int>(a.shape(1)), cols = static_cast<int>(a.shape(2));
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    auto plane = [&](int i) {
        return ScalarField(rows, cols, std::vector<double>(a.data() + i * n, a.data() + (i + 1) * n));
    };
    return MatrixField{plane(0), plane(1), plane(2), plane(3)};
}

py::tuple result(const SolveResult& r) {
    py::list hist;
    for (const auto& h : r.history) {
        py::dict d;
        d["iteration"] = h.iteration;
        d["split_residual"] = h.split_residual;
        d["hessian_residual"] = h.hessian_residual;
        d["tensor_residual"] = h.tensor_residual;
        d["relative_change"] = h.relative_change;
        hist.append(d);
    }
    py::dict info;
    info["iterations"] = r.iterations;
    info["converged"] = r.converged;
    info["history"] = hist;
    return py::make_tuple(to_array(r.image()), info);
}

}  // namespace

PYBIND11_MODULE(_twso, m) {
    m.doc() = "Tensor-weighted second-order variational restoration";

    py::enum_<TensorMode>(m, "TensorMode")
        .value("edge", TensorMode::edge)
        .value("coherence", TensorMode::coherence);

    py::class_<TensorParams>(m, "TensorParams")
        .def(py::init<>())
        .def_readwrite("sigma", &TensorParams::sigma)
        .def_readwrite("rho", &TensorParams::rho)
        .def_readwrite("contrast", &TensorParams::contrast)
        .def_readwrite("gamma", &TensorParams::gamma)
        .def_readwrite("mode", &TensorParams::mode);

    py::class_<SolverParams>(m, "SolverParams")
        .def(py::init<>())
        .def_readwrite("eta", &SolverParams::eta)
        .def_readwrite("p", &SolverParams::p)
        .def_readwrite("theta1", &SolverParams::theta1)
        .def_readwrite("theta2", &SolverParams::theta2)
        .def_readwrite("theta3", &SolverParams::theta3)
        .def_readwrite("max_iter", &SolverParams::max_iter)
        .def_readwrite("tol", &SolverParams::tol)
        .def_readwrite("refine_every", &SolverParams::refine_every)
        .def_readwrite("tensor", &SolverParams::tensor)
        .def_static("denoise_defaults", &SolverParams::denoise_defaults)
        .def_static("impulse_defaults", &SolverParams::impulse_defaults)
        .def_static("inpaint_defaults", &SolverParams::inpaint_defaults)
        .def("validate", &SolverParams::validate);

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const std::invalid_argument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("hessian", [](const InArray& u) { return stack(hessian(to_field(u))); }, py::arg("u"));
    m.def("div2", [](const InArray& p) { return to_array(div2(unstack(p))); }, py::arg("p"));
    m.def("bilaplacian_symbol", &bilaplacian_symbol, py::arg("q"), py::arg("r"), py::arg("cols"),
          py::arg("rows"));

    m.def(
        "diffusion_tensor",
        [](const InArray& u, const TensorParams& tp) {
            const auto t = build_diffusion_tensor(to_field(u), tp);
            return py::make_tuple(to_array(t.t11), to_array(t.t12), to_array(t.t22));
        },
        py::arg("u"), py::arg("params") = TensorParams{});

    m.def(
        "denoise",
        [](const InArray& f, std::optional<SolverParams> params, bool sotv) {
            const Problem pr = Problem::denoise(to_field(f));
            const SolverParams sp = params.value_or(SolverParams::denoise_defaults());
            SolveResult r;
            {
                py::gil_scoped_release release;
                r = sotv ? run_sotv(pr, sp) : run(pr, sp);
            }
            return result(r);
        },
        py::arg("f"), py::arg("params") = py::none(), py::arg("sotv") = false,
        "Returns (u, info). info holds iterations, converged and the residual history.");

    m.def(
        "inpaint",
        [](const InArray& f, const InMask& known, std::optional<SolverParams> params, bool sotv) {
            const Problem pr = Problem::inpaint(to_field(f), to_mask(known));
            const SolverParams sp = params.value_or(SolverParams::inpaint_defaults());
            SolveResult r;
            {
                py::gil_scoped_release release;
                r = sotv ? run_sotv(pr, sp) : run(pr, sp);
            }
            return result(r);
        },
        py::arg("f"), py::arg("known"), py::arg("params") = py::none(), py::arg("sotv") = false,
        "known is True on observed pixels.");

    m.def("add_gaussian_noise",
          [](const InArray& u, double var, Seed seed) {
              return to_array(add_gaussian_noise(to_field(u), var, seed));
          },
          py::arg("u"), py::arg("variance"), py::arg("seed"));
    m.def("add_salt_pepper",
          [](const InArray& u, double density, Seed seed) {
              return to_array(add_salt_pepper(to_field(u), density, seed));
          },
          py::arg("u"), py::arg("density"), py::arg("seed"));
    m.def("random_mask",
          [](int rows, int cols, double fraction, Seed seed) {
              return to_bool(make_random_mask(rows, cols, fraction, seed));
          },
          py::arg("rows"), py::arg("cols"), py::arg("missing_fraction"), py::arg("seed"));
    m.def("shapes_fixture", [](int rows, int cols) { return to_array(make_shapes_fixture(rows, cols)); },
          py::arg("rows"), py::arg("cols"));
    m.def(
        "stripe_fixture",
        [](int size, const std::string& gap) {
            const auto fx = make_stripe_fixture(size, size, GapSpec::parse(gap));
            return py::make_tuple(to_array(fx.truth), to_bool(fx.mask));
        },
        py::arg("size") = 64, py::arg("gap") = "straight:8", "Returns (truth, known).");

    m.def("psnr", [](const InArray& a, const InArray& b) { return psnr(to_field(a), to_field(b)); });
    m.def("ssim", [](const InArray& a, const InArray& b) { return ssim(to_field(a), to_field(b)); });
    m.def("mse", [](const InArray& a, const InArray& b) { return mse(to_field(a), to_field(b)); });
}
