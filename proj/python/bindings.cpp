#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kinf/pipeline.hpp"

namespace py = pybind11;
using namespace kinf;

namespace {

pipeline::RunConfig config_from(const std::string& text, const std::string& base_dir)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config: parse error: ") + e.what());
    }
    return pipeline::parse_config(j, base_dir);
}

// Gaussian multiplier of the given width, or none for width <= 0.
BilinearKernel kernel_for(const Matrix& a, double multiplier_width)
{
    const auto n = static_cast<std::size_t>(a.rows());
    BilinearKernel k = synthesize(CoefficientMatrix{a}, SmoothBasis(n));
    if (multiplier_width > 0.0) {
        const Multiplier m = Multiplier::gaussian(multiplier_width);
        k = scale_by_multiplier(k, m, multiplier_matrix(m, k.basis, default_quadrature_nodes(n)));
    }
    return k;
}

using Command = int (*)(const pipeline::RunConfig&, const std::filesystem::path&, std::ostream&);

py::tuple run_command(Command cmd, const std::string& config, const std::string& out, const std::string& base_dir)
{
    const auto c = config_from(config, base_dir);
    std::ostringstream log;
    const int code = cmd(c, out.empty() ? c.output : std::filesystem::path(out), log);
    return py::make_tuple(code, log.str());
}

}  // namespace

PYBIND11_MODULE(_kinf, m)
{
    m.doc() = "Third-kind integral equation reduction over smooth bilinear kernels";

    static py::exception<Error> error(m, "KinfError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyObject* type = error.ptr();
            py::object instance = py::reinterpret_steal<py::object>(PyObject_CallFunction(type, "s", e.what()));
            instance.attr("kind") = to_string(e.kind());
            instance.attr("value") = e.value();
            PyErr_SetObject(type, instance.ptr());
        }
    });

    m.def("hermite_functions", &SmoothBasis::hermite_functions, py::arg("count"), py::arg("s"),
          "Orthonormal Hermite functions u_0 .. u_{count-1} at s.");
    m.def(
        "basis_values",
        [](std::size_t size, int order, double s) { return SmoothBasis(size).values(order, s); }, py::arg("size"),
        py::arg("order"), py::arg("s"), "Derivatives of the given order of u_0 .. u_{size-1} at s.");
    m.def(
        "gauss_hermite",
        [](std::size_t points) {
            const auto rule = gauss_hermite(points);
            return py::make_tuple(rule.nodes, rule.weights);
        },
        py::arg("points"), "Nodes and weights for integrals of f over the real line; weights include exp(x^2).");
    m.def(
        "rademacher",
        [](int depth, int level) { return rademacher(MeasurableSet::whole(build_space(depth)), level).values.values; },
        py::arg("depth"), py::arg("level"), "Cell values of R_level on [0, 1) at the given grid depth.");

    m.def(
        "eval_kernel",
        [](const Matrix& a, int i, int j, double s, double t, double multiplier_width) {
            return eval_kernel(kernel_for(a, multiplier_width), i, j, s, t);
        },
        py::arg("coefficients"), py::arg("i"), py::arg("j"), py::arg("s"), py::arg("t"), py::arg("multiplier_width") = 0.0,
        "d^{i+j}/ds^i dt^j of sum a_mn u_m(s) u_n(t), optionally times a Gaussian in s.");
    m.def(
        "hs_norm", [](const Matrix& a, double multiplier_width) { return hs_norm(kernel_for(a, multiplier_width)); },
        py::arg("coefficients"), py::arg("multiplier_width") = 0.0);
    m.def(
        "vanishing_defect",
        [](const Matrix& a) {
            const auto k = kernel_for(a, 0.0);
            return vanishing_defect(k, vanishing_radius(static_cast<std::size_t>(a.rows())), ProbeGrid{});
        },
        py::arg("coefficients"), "Kernel and Carleman sizes at radius 8 + sqrt(2N).");
    m.def(
        "m_factorize",
        [](const Matrix& a) {
            const auto f = m_factorize(CoefficientMatrix{a});
            return py::make_tuple(f.W, f.V);
        },
        py::arg("coefficients"), "W, V with A = W V^H and W W^H, V V^H positive.");
    m.def("column_decay", &column_decay, py::arg("matrix"), "Max column norm over the first and last quarter.");

    m.def(
        "verify_battery",
        [](const std::string& config, const std::string& base_dir) {
            std::vector<pipeline::Check> checks;
            nlohmann::json report = pipeline::verify_battery(config_from(config, base_dir), checks);
            bool passed = true;
            report["checks"] = nlohmann::json::array();
            for (const auto& c : checks) {
                report["checks"].push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
                passed = passed && c.passed;
            }
            report["passed"] = passed;
            return report.dump();
        },
        py::arg("config"), py::arg("base_dir") = "", "Runs the property battery; returns the report as JSON text.");
    m.def(
        "build_sequence",
        [](const std::string& c, const std::string& out, const std::string& base) {
            return run_command(&pipeline::cmd_build_sequence, c, out, base);
        },
        py::arg("config"), py::arg("out") = "", py::arg("base_dir") = "");
    m.def(
        "reduce",
        [](const std::string& c, const std::string& out, const std::string& base) {
            return run_command(&pipeline::cmd_reduce, c, out, base);
        },
        py::arg("config"), py::arg("out") = "", py::arg("base_dir") = "");
    m.def(
        "verify",
        [](const std::string& c, const std::string& out, const std::string& base) {
            return run_command(&pipeline::cmd_verify, c, out, base);
        },
        py::arg("config"), py::arg("out") = "", py::arg("base_dir") = "");
}
