#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "bimef/bimef.hpp"

namespace py = pybind11;
using namespace bimef;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw ArgumentError("expected an (H, W, 3) array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return Image(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

ScalarMap to_map(const Array& a) {
    if (a.ndim() != 2) throw ArgumentError("expected an (H, W) array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return ScalarMap(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

template <int C>
Array to_array(const Raster<C>& r) {
    std::vector<py::ssize_t> shape{r.height(), r.width()};
    if constexpr (C > 1) shape.push_back(C);
    Array out(shape);
    std::memcpy(out.mutable_data(), r.values().data(), r.values().size() * sizeof(double));
    return out;
}

CameraModel camera(double a, double b) {
    CameraModel m{a, b};
    m.validate();
    return m;
}

}  // namespace

PYBIND11_MODULE(_bimef, m) {
    m.doc() = "Low-light image enhancement by dual-exposure fusion";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<FormatError>(m, "FormatError", error.ptr());
    py::register_exception<SolverError>(m, "SolverError", error.ptr());

    m.def("load_image", [](const std::filesystem::path& p) { return to_array(load_image(p)); },
          py::arg("path"), "Decode a PNG or JPEG into an (H, W, 3) float array in [0, 1].");
    m.def("save_image",
          [](const Array& img, const std::filesystem::path& p) { save_image(to_image(img), p); },
          py::arg("image"), py::arg("path"), "Encode an (H, W, 3) array as an 8-bit PNG.");
    m.def("lightness", [](const Array& img) { return to_array(lightness(to_image(img))); },
          py::arg("image"), "Per-pixel channel maximum.");
    m.def("geometric_brightness",
          [](const Array& img) { return to_array(geometric_brightness(to_image(img))); },
          py::arg("image"), "Per-pixel cube root of the channel product.");

    m.def(
        "estimate_illumination",
        [](const Array& img, double lam, double eps, int window, double tol, int max_iter) {
            SolverConfig cfg;
            cfg.lambda = lam;
            cfg.epsilon = eps;
            cfg.window = window;
            cfg.pcg_tol = tol;
            cfg.pcg_max_iter = max_iter;
            const auto P = to_image(img);
            py::gil_scoped_release release;
            auto T = estimate_illumination(P, cfg);
            py::gil_scoped_acquire acquire;
            return to_array(T);
        },
        py::arg("image"), py::arg("lam") = 1.0, py::arg("epsilon") = 1e-3, py::arg("window") = 5,
        py::arg("pcg_tol") = 1e-5, py::arg("pcg_max_iter") = 1000,
        "Smoothed illumination map T of shape (H, W), clamped to [epsilon, 1].");

    m.def(
        "btf_params",
        [](double k, double a, double b) {
            const auto p = btf_params(camera(a, b), k);
            return py::make_tuple(p.beta, p.gamma);
        },
        py::arg("k"), py::arg("a") = -0.3293, py::arg("b") = 1.1258,
        "(beta, gamma) of the brightness transform at exposure ratio k.");
    m.def(
        "apply_btf",
        [](const Array& values, double k, double a, double b) {
            const auto p = btf_params(camera(a, b), k);
            Array out(std::vector<py::ssize_t>(values.shape(), values.shape() + values.ndim()));
            auto* dst = out.mutable_data();
            for (py::ssize_t i = 0; i < values.size(); ++i) dst[i] = apply_btf(values.data()[i], p);
            return out;
        },
        py::arg("values"), py::arg("k"), py::arg("a") = -0.3293, py::arg("b") = 1.1258,
        "Elementwise beta * v**gamma, unclamped.");
    m.def(
        "crf",
        [](double E, double a, double b, std::optional<double> c) { return crf(camera(a, b), E, c); },
        py::arg("E"), py::arg("a") = -0.3293, py::arg("b") = 1.1258, py::arg("c") = py::none(),
        "Camera response at normalized irradiance E.");

    m.def(
        "optimal_k",
        [](const Array& img, const Array& T, double a, double b) {
            return optimal_k(to_image(img), to_map(T), camera(a, b));
        },
        py::arg("image"), py::arg("illumination"), py::arg("a") = -0.3293,
        py::arg("b") = 1.1258, "Entropy-maximizing exposure ratio in [1, 100].");

    m.def(
        "enhance",
        [](const Array& img, double mu, std::optional<double> k, double lam, double eps,
           double a, double b) {
            EnhanceConfig cfg;
            cfg.mu = mu;
            cfg.fixed_k = k;
            cfg.solver.lambda = lam;
            cfg.solver.epsilon = eps;
            cfg.camera = {a, b};
            const auto P = to_image(img);
            EnhanceOutput out;
            {
                py::gil_scoped_release release;
                out = enhance(P, cfg);
            }
            py::dict d;
            d["result"] = to_array(out.result);
            d["illumination"] = to_array(out.illumination);
            d["weight"] = to_array(out.weight);
            d["synthetic"] = to_array(out.synthetic);
            d["k_hat"] = out.k_hat;
            d["pcg_iterations"] = out.solver.iterations;
            d["seconds"] = out.timings.total();
            return d;
        },
        py::arg("image"), py::arg("mu") = 0.5, py::arg("k") = py::none(), py::arg("lam") = 1.0,
        py::arg("epsilon") = 1e-3, py::arg("a") = -0.3293, py::arg("b") = 1.1258,
        "Enhance an (H, W, 3) image; returns a dict with result, illumination, weight, "
        "synthetic, k_hat, pcg_iterations and seconds.");

    m.def(
        "loe",
        [](const Array& original, const Array& enhanced, int sample_size) {
            return loe(to_image(original), to_image(enhanced), LoeConfig{sample_size});
        },
        py::arg("original"), py::arg("enhanced"), py::arg("sample_size") = 100,
        "Lightness order error on a sample_size x sample_size grid.");
}
