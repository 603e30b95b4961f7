// Python bindings for the reflected-MMBM toolkit.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmbm/localtime.hpp"
#include "mmbm/model_io.hpp"
#include "mmbm/simulate.hpp"

namespace py = pybind11;
using namespace mmbm;

namespace {

MmbmModel make_model(const Matrix& Q, const Vector& mu, const Vector& sigma2,
                     const std::vector<std::string>& labels) {
    MmbmModel m;
    m.Q = Q;
    m.mu = mu;
    m.sigma2 = sigma2;
    m.state_labels = labels;
    validate(m);
    return m;
}

}  // namespace

PYBIND11_MODULE(_mmbm, mod) {
    mod.doc() = "Markov-modulated Brownian motion with two reflecting barriers";

    py::register_exception<ModelError>(mod, "ModelError", PyExc_ValueError);
    py::register_exception<IoError>(mod, "IoError", PyExc_ValueError);
    py::register_exception<LinalgError>(mod, "LinalgError", PyExc_ArithmeticError);
    py::register_exception<PassageError>(mod, "PassageError", PyExc_ArithmeticError);
    py::register_exception<ReflectionError>(mod, "ReflectionError",
                                            PyExc_ArithmeticError);
    py::register_exception<LocalTimeError>(mod, "LocalTimeError",
                                           PyExc_ArithmeticError);

    py::class_<MmbmModel>(mod, "Model")
        .def(py::init(&make_model), py::arg("Q"), py::arg("mu"), py::arg("sigma2"),
             py::arg("labels") = std::vector<std::string>{})
        .def_readonly("Q", &MmbmModel::Q)
        .def_readonly("mu", &MmbmModel::mu)
        .def_readonly("sigma2", &MmbmModel::sigma2)
        .def_readonly("labels", &MmbmModel::state_labels)
        .def("__len__", &MmbmModel::size);

    py::enum_<Direction>(mod, "Direction")
        .value("up", Direction::up)
        .value("down", Direction::down);

    py::class_<PassagePair>(mod, "PassagePair")
        .def_readonly("Pi", &PassagePair::Pi)
        .def_readonly("Lambda", &PassagePair::Lambda)
        .def_readonly("rho", &PassagePair::rho)
        .def_readonly("q", &PassagePair::q);

    py::class_<ReflectedLaw>(mod, "ReflectedLaw")
        .def_readonly("grid", &ReflectedLaw::grid)
        .def_readonly("survival", &ReflectedLaw::survival)
        .def_readonly("cdf", &ReflectedLaw::cdf)
        .def_readonly("density", &ReflectedLaw::density)
        .def_readonly("mass0", &ReflectedLaw::mass0)
        .def_readonly("massB", &ReflectedLaw::massB);

    py::class_<LocalTimeTransform>(mod, "LocalTimeTransform")
        .def_readonly("alpha", &LocalTimeTransform::alpha)
        .def_readonly("q", &LocalTimeTransform::q)
        .def_readonly("ML", &LocalTimeTransform::ML)
        .def_readonly("MU", &LocalTimeTransform::MU)
        .def_readonly("FL", &LocalTimeTransform::FL)
        .def_readonly("FU", &LocalTimeTransform::FU)
        .def_readonly("initL", &LocalTimeTransform::initL)
        .def_readonly("initU", &LocalTimeTransform::initU)
        .def_readonly("kL", &LocalTimeTransform::kL)
        .def_readonly("kU", &LocalTimeTransform::kU);

    py::class_<OverflowRates>(mod, "OverflowRates")
        .def_readonly("unused", &OverflowRates::unused)
        .def_readonly("overflow", &OverflowRates::overflow)
        .def_readonly("kappaL", &OverflowRates::kappaL)
        .def_readonly("kappaU", &OverflowRates::kappaU)
        .def_readonly("piL", &OverflowRates::piL)
        .def_readonly("piU", &OverflowRates::piU);

    py::class_<SimConfig>(mod, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("replications", &SimConfig::replications)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("batches", &SimConfig::batches);

    py::class_<PathRecord>(mod, "PathRecord")
        .def_readonly("times", &PathRecord::times)
        .def_readonly("X", &PathRecord::X)
        .def_readonly("J", &PathRecord::J)
        .def_readonly("W", &PathRecord::W)
        .def_readonly("L", &PathRecord::L)
        .def_readonly("U", &PathRecord::U);

    py::class_<MatrixEstimate>(mod, "MatrixEstimate")
        .def_readonly("value", &MatrixEstimate::value)
        .def_readonly("stderr", &MatrixEstimate::stderr_);

    py::class_<OverflowEstimate>(mod, "OverflowEstimate")
        .def_readonly("unused", &OverflowEstimate::unused)
        .def_readonly("unused_se", &OverflowEstimate::unused_se)
        .def_readonly("overflow", &OverflowEstimate::overflow)
        .def_readonly("overflow_se", &OverflowEstimate::overflow_se);

    mod.def("phase_classes", [](const MmbmModel& m) {
        const PhaseClasses cls = phase_classes(m);
        return py::make_tuple(cls.e_plus, cls.e_minus);
    });
    mod.def("asymptotic_drift", &asymptotic_drift);
    mod.def("passage_matrices", &passage_matrices, py::arg("model"), py::arg("q"),
            py::arg("direction"), py::arg("allow_zero_drift") = false);
    mod.def("crossing_probability", &crossing_probability, py::arg("pair"),
            py::arg("x"));
    mod.def(
        "stationary_law",
        [](const MmbmModel& m, double B, int grid_points) {
            return stationary_law(m, B, grid_points);
        },
        py::arg("model"), py::arg("B"), py::arg("grid_points") = 201);
    mod.def(
        "stationary_law_at",
        [](const MmbmModel& m, double B, const Vector& grid) {
            return stationary_law(m, B, grid);
        },
        py::arg("model"), py::arg("B"), py::arg("grid"));
    mod.def("exp_epoch_law", &exp_epoch_law, py::arg("model"), py::arg("B"),
            py::arg("q"), py::arg("start_top"), py::arg("x"));
    mod.def("admissible_alpha", &admissible_alpha, py::arg("model"), py::arg("q"));
    mod.def("localtime_transform", &localtime_transform, py::arg("model"),
            py::arg("B"), py::arg("x0"), py::arg("q"), py::arg("alpha"));
    mod.def("busy_period_transform", &busy_period_transform, py::arg("model"),
            py::arg("B"), py::arg("q"), py::arg("alpha"));
    mod.def("overflow_rates", &overflow_rates, py::arg("model"), py::arg("B"));
    mod.def("brownian_overflow_process", &brownian_overflow_process, py::arg("mu"),
            py::arg("B"));

    mod.def(
        "simulate_path",
        [](const MmbmModel& m, double B, double x0, int j0, const SimConfig& cfg) {
            return simulate_path(m, StripSpec{B, x0}, j0, cfg);
        },
        py::arg("model"), py::arg("B"), py::arg("x0"), py::arg("j0"),
        py::arg("config"));
    mod.def("estimate_passage", &estimate_passage, py::arg("model"), py::arg("q"),
            py::arg("x"), py::arg("direction"), py::arg("config"));
    mod.def(
        "estimate_stationary",
        [](const MmbmModel& m, double B, double x0, const Vector& levels,
           const SimConfig& cfg) {
            return estimate_stationary(m, StripSpec{B, x0}, levels, cfg);
        },
        py::arg("model"), py::arg("B"), py::arg("x0"), py::arg("levels"),
        py::arg("config"));
    mod.def(
        "estimate_overflow",
        [](const MmbmModel& m, double B, double x0, const SimConfig& cfg) {
            return estimate_overflow(m, StripSpec{B, x0}, cfg);
        },
        py::arg("model"), py::arg("B"), py::arg("x0"), py::arg("config"));

    mod.def("parse_model_document", [](const std::string& text) {
        const ModelDocument doc = parse_model_document(text);
        py::dict out;
        out["model"] = doc.model;
        out["B"] = doc.B;
        if (doc.x0) out["x0"] = *doc.x0;
        if (doc.q) out["q"] = *doc.q;
        return out;
    });
}
