#include <complex>
#include <cstring>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uqi/fock.hpp"
#include "uqi/imaging.hpp"
#include "uqi/io.hpp"
#include "uqi/magnification.hpp"
#include "uqi/mode_space.hpp"
#include "uqi/optics.hpp"

namespace py = pybind11;
using namespace uqi;

namespace {

ObjectMap object_from_array(py::array_t<std::complex<double>, py::array::c_style> values,
                            double pitch, const std::string& boundary) {
    if (values.ndim() != 2) {
        throw std::invalid_argument("object array must be 2-D");
    }
    ObjectMap obj;
    obj.height = static_cast<int>(values.shape(0));
    obj.width = static_cast<int>(values.shape(1));
    obj.pitch = pitch;
    if (boundary == "transparent") {
        obj.boundary = BoundaryPolicy::Transparent;
    } else if (boundary == "opaque") {
        obj.boundary = BoundaryPolicy::Opaque;
    } else {
        throw std::invalid_argument("boundary must be 'transparent' or 'opaque'");
    }
    obj.values.resize(static_cast<std::size_t>(obj.width) * obj.height);
    std::memcpy(obj.values.data(), values.data(), obj.values.size() * sizeof(std::complex<double>));
    obj.validate();
    return obj;
}

py::array_t<double> image_to_array(const CameraImage& img) {
    py::array_t<double> out({img.height, img.width});
    std::memcpy(out.mutable_data(), img.rates.data(), img.rates.size() * sizeof(double));
    return out;
}

} // namespace

PYBIND11_MODULE(uqi, m) {
    m.doc() = "Camera counting-rate simulator for imaging with undetected photons";

    py::register_exception<Error>(m, "UqiError");

    py::class_<OpticalConfig>(m, "OpticalConfig")
        .def(py::init([](double lambda_s, double lambda_i, double f_i, double f_0, double n_s,
                         double n_i, double n_0, std::complex<double> v_p1,
                         std::complex<double> v_p2, double phi_p, double delta_s0, double phi_i0,
                         double c0, double tilt) {
                 OpticalConfig cfg;
                 cfg.lambda_s = lambda_s;
                 cfg.lambda_i = lambda_i;
                 cfg.f_i = f_i;
                 cfg.f_0 = f_0;
                 cfg.n_s = n_s;
                 cfg.n_i = n_i;
                 cfg.n_0 = n_0;
                 cfg.v_p1 = v_p1;
                 cfg.v_p2 = v_p2;
                 cfg.phi_p = phi_p;
                 cfg.delta_s0 = delta_s0;
                 cfg.phi_i0 = phi_i0;
                 cfg.c0 = c0;
                 cfg.tilt = tilt;
                 cfg = OpticalConfig::with_derived_pump(cfg);
                 cfg.validate();
                 return cfg;
             }),
             py::arg("lambda_s"), py::arg("lambda_i"), py::arg("f_i"), py::arg("f_0"),
             py::arg("n_s") = 1.0, py::arg("n_i") = 1.0, py::arg("n_0") = 1.0,
             py::arg("v_p1") = std::complex<double>{1.0, 0.0},
             py::arg("v_p2") = std::complex<double>{1.0, 0.0}, py::arg("phi_p") = 0.0,
             py::arg("delta_s0") = 0.0, py::arg("phi_i0") = 0.0, py::arg("c0") = 0.0,
             py::arg("tilt") = 0.0)
        .def_readonly("lambda_s", &OpticalConfig::lambda_s)
        .def_readonly("lambda_i", &OpticalConfig::lambda_i)
        .def_readonly("lambda_p", &OpticalConfig::lambda_p)
        .def_readonly("f_i", &OpticalConfig::f_i)
        .def_readonly("f_0", &OpticalConfig::f_0);

    py::class_<CameraGeometry>(m, "CameraGeometry")
        .def(py::init([](int width, int height, double pitch) {
                 CameraGeometry cam{width, height, pitch};
                 cam.validate();
                 return cam;
             }),
             py::arg("width"), py::arg("height"), py::arg("pitch"))
        .def_readonly("width", &CameraGeometry::width)
        .def_readonly("height", &CameraGeometry::height)
        .def_readonly("pitch", &CameraGeometry::pitch);

    py::class_<ObjectMap>(m, "ObjectMap")
        .def(py::init(&object_from_array), py::arg("values"), py::arg("pitch"),
             py::arg("boundary") = "transparent",
             "Complex transmission samples (2-D array, row-major, centered on the axis)")
        .def_readonly("width", &ObjectMap::width)
        .def_readonly("height", &ObjectMap::height)
        .def_readonly("pitch", &ObjectMap::pitch);

    py::class_<PhaseCalibration>(m, "PhaseCalibration")
        .def_readonly("phi_pc", &PhaseCalibration::phi_pc)
        .def_readonly("phi_pd", &PhaseCalibration::phi_pd);

    py::class_<MagnificationReport>(m, "MagnificationReport")
        .def_readonly("m_theory", &MagnificationReport::m_theory)
        .def_readonly("m_measured", &MagnificationReport::m_measured)
        .def_readonly("relative_error", &MagnificationReport::relative_error)
        .def_readonly("max_angle_used", &MagnificationReport::max_angle_used);

    py::class_<ImagingEngine>(m, "ImagingEngine")
        .def(py::init<const OpticalConfig&, const CameraGeometry&>(), py::arg("config"),
             py::arg("camera"))
        .def("calibrate", &ImagingEngine::calibrate, py::arg("sweep_steps") = 64)
        .def(
            "render",
            [](const ImagingEngine& e, double phi_p, const ObjectMap& obj) {
                return image_to_array(e.render(phi_p, obj));
            },
            py::arg("phi_p"), py::arg("object"))
        .def(
            "difference_image",
            [](const ImagingEngine& e, const ObjectMap& obj, const PhaseCalibration& cal) {
                return image_to_array(e.difference_image(obj, cal));
            },
            py::arg("object"), py::arg("calibration"))
        .def(
            "sum_image",
            [](const ImagingEngine& e, const ObjectMap& obj, const PhaseCalibration& cal) {
                return image_to_array(e.sum_image(obj, cal));
            },
            py::arg("object"), py::arg("calibration"))
        .def("visibility", &ImagingEngine::visibility, py::arg("object"), py::arg("ix"),
             py::arg("iy"), py::arg("sweep_steps") = 64);

    m.def("magnification_theory", &magnification_theory, py::arg("config"));
    m.def(
        "measure_magnification",
        [](const OpticalConfig& cfg, const CameraGeometry& camera, int outer_pixel) {
            return magnification_measured(make_two_dot_object(cfg, camera, outer_pixel), cfg,
                                          camera);
        },
        py::arg("config"), py::arg("camera"), py::arg("outer_pixel") = -1);

    m.def(
        "oracle_max_deviation",
        [](const OpticalConfig& cfg, const CameraGeometry& camera, const ObjectMap& obj,
           double phi_p, double pair_scale) {
            OpticalConfig run = OpticalConfig::with_derived_pump(cfg);
            run.validate();
            const ModeGrid grid = build_mode_grid(run, camera);
            const ModeRegistry registry(grid.entries.size());
            const OracleSettings settings{pair_scale, 2};
            const FockState state = build_superposition_state(obj, run, grid, phi_p, settings);
            double max_dev = 0.0;
            for (const auto& entry : grid.entries) {
                const double analytic = counting_rate(entry, phi_p, obj, run);
                const double oracle = oracle_rate(state, entry, registry, run, settings);
                max_dev = std::max(max_dev, std::abs(oracle - analytic) / std::abs(analytic));
            }
            return max_dev;
        },
        py::arg("config"), py::arg("camera"), py::arg("object"), py::arg("phi_p") = 0.0,
        py::arg("pair_scale") = 1e-3,
        "Max relative analytic-vs-Fock-oracle rate deviation over a mode grid");

    m.def(
        "product_state_scaling_exponent",
        [](const OpticalConfig& cfg, const CameraGeometry& camera, const ObjectMap& obj,
           const std::vector<double>& g_values) {
            OpticalConfig run = OpticalConfig::with_derived_pump(cfg);
            run.validate();
            const ModeGrid grid = build_mode_grid(run, camera);
            return product_state_scaling_exponent(run, obj, grid, g_values);
        },
        py::arg("config"), py::arg("camera"), py::arg("object"), py::arg("g_values"),
        "Log-log exponent of the product-vs-superposition state rate difference");

    m.def("run_cli", &run_cli, py::arg("args"), "Run an imager subcommand; returns exit status");
}
