#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "npspec/dgp.hpp"
#include "npspec/efficiency.hpp"
#include "npspec/errors.hpp"
#include "npspec/grammar.hpp"
#include "npspec/harness.hpp"
#include "npspec/kernels.hpp"
#include "npspec/loss.hpp"
#include "npspec/smoothing.hpp"
#include "npspec/spectest.hpp"
#include "npspec/stats.hpp"

namespace py = pybind11;
using namespace npspec;

namespace {

template <class T, class Parse>
T parse_or_throw(const std::string& text, Parse parse, const char* what) {
    const auto v = parse(text);
    if (!v) throw std::invalid_argument(std::string("unknown ") + what + " '" + text + "'");
    return *v;
}

py::dict constants_dict(const KernelConstants& k) {
    py::dict d;
    d["a"] = k.a;
    d["b"] = k.b;
    d["c"] = k.c;
    d["d"] = k.d;
    d["t"] = k.t;
    d["p"] = k.p;
    return d;
}

py::dict outcome_dict(const TestResult& r) {
    py::dict d;
    d["test"] = r.test.label();
    d["statistic"] = r.statistic;
    if (r.asymptotic) {
        py::dict a;
        a["centering"] = r.asymptotic->centering.value_or(0.0);
        a["scale_factor"] = r.asymptotic->scale_factor;
        a["z"] = r.asymptotic->z;
        a["p_value"] = r.asymptotic->p_value;
        d["asymptotic"] = a;
    } else {
        d["asymptotic"] = py::none();
    }
    if (r.bootstrap) {
        py::dict b;
        b["p_star"] = r.bootstrap->p_star;
        b["replicates"] = r.bootstrap->replicates;
        d["bootstrap"] = b;
    } else {
        d["bootstrap"] = py::none();
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kernel-based specification tests for regression models";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);

    m.def(
        "kernel_constants",
        [](const std::string& kernel, int p, double tol) {
            return constants_dict(kernel_constants(grammar::parse_kernel(kernel), p, tol));
        },
        py::arg("kernel") = "uniform", py::arg("p") = 1, py::arg("tol") = kDefaultQuadratureTol);

    m.def(
        "eval_kernel", [](const std::string& kernel, double u) { return eval_kernel(grammar::parse_kernel(kernel), u); },
        py::arg("kernel"), py::arg("u"));
    m.def(
        "self_convolution",
        [](const std::string& kernel, double u) { return self_convolution(grammar::parse_kernel(kernel), u); },
        py::arg("kernel"), py::arg("u"));

    m.def(
        "loss_eval", [](const std::string& loss, double z) { return loss_eval(grammar::parse_loss(loss), z); },
        py::arg("loss"), py::arg("z"));
    m.def(
        "loss_curvature", [](const std::string& loss) { return loss_curvature(grammar::parse_loss(loss)); },
        py::arg("loss"));

    m.def(
        "nw_fit",
        [](const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const std::string& kernel, double h) {
            const auto fit = nw_fit(residuals, x, grammar::parse_kernel(kernel), h);
            py::dict d;
            d["m_hat"] = fit.m_hat;
            d["ssr1"] = fit.ssr1;
            d["sigma2_hat"] = fit.sigma2_hat;
            return d;
        },
        py::arg("residuals"), py::arg("x"), py::arg("kernel") = "uniform", py::arg("h"));

    m.def(
        "rot_bandwidth", [](const Eigen::MatrixXd& x, double omega) { return rot_bandwidth(x, omega).h; },
        py::arg("x"), py::arg("omega") = 2.0 / 9.0);

    m.def(
        "ols_fit",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
            const auto fit = ols_fit(Sample{y, x});
            py::dict d;
            d["theta_hat"] = fit.theta_hat;
            d["residuals"] = fit.residuals;
            d["ssr0"] = fit.ssr0;
            return d;
        },
        py::arg("y"), py::arg("x"));

    m.def("glr_statistic", &glr_statistic, py::arg("ssr0"), py::arg("ssr1"), py::arg("n"));
    m.def("f_statistic", &f_statistic, py::arg("ssr0"), py::arg("ssr1"));

    m.def(
        "pitman_are",
        [](const std::string& kernel, double omega, int p, const std::string& convention) {
            const auto r = pitman_are(grammar::parse_kernel(kernel), p, omega,
                                      parse_or_throw<AreConvention>(convention, parse_are_convention, "convention"));
            py::dict d;
            d["ratio"] = r.ratio;
            d["exponent"] = r.exponent;
            d["are"] = r.are;
            return d;
        },
        py::arg("kernel"), py::arg("omega"), py::arg("p") = 1, py::arg("convention") = "eq52");

    m.def(
        "noncentrality",
        [](const std::string& kernel, double e_delta2, double omega_measure, int p) {
            const auto nc = noncentrality_pair(grammar::parse_kernel(kernel), e_delta2, omega_measure, p);
            return py::make_tuple(nc.psi, nc.xi);
        },
        py::arg("kernel"), py::arg("e_delta2"), py::arg("omega_measure"), py::arg("p") = 1);

    m.def(
        "gen_sample",
        [](const std::string& model, double theta, const std::string& errors, Index n, std::uint64_t seed,
           const std::string& truncation) {
            DGPSpec spec;
            spec.model = parse_or_throw<Model>(model, parse_model, "model");
            spec.theta = theta;
            spec.error_law = parse_or_throw<ErrorLaw>(errors, parse_error_law, "error law");
            spec.n = n;
            spec.seed = seed;
            spec.truncation = parse_or_throw<Truncation>(truncation, parse_truncation, "truncation");
            const auto s = gen_sample(spec);
            return py::make_tuple(s.y, s.x);
        },
        py::arg("model") = "s_null", py::arg("theta") = 0.0, py::arg("errors") = "normal", py::arg("n") = 100,
        py::arg("seed") = 0, py::arg("truncation") = "clip");

    m.def(
        "spec_test",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const std::string& tests, const std::string& kernel,
           const std::string& bandwidth, const std::string& calibration, int b, std::uint64_t seed,
           const std::string& mode, unsigned threads) {
            SpecTestConfig c;
            c.tests = grammar::parse_test_list(tests);
            c.kernel = grammar::parse_kernel(kernel);
            c.bandwidth = grammar::parse_bandwidth(bandwidth);
            c.calibration = parse_or_throw<Calibration>(calibration, parse_calibration, "calibration");
            c.b = b;
            c.seed = seed;
            c.mode = parse_or_throw<BootstrapMode>(mode, parse_bootstrap_mode, "bootstrap mode");
            c.threads = threads;
            SpecTestReport report;
            {
                py::gil_scoped_release release;
                report = run_specification_test(Sample{y, x}, c);
            }
            py::dict d;
            d["n"] = report.n;
            d["p"] = report.p;
            d["h"] = report.bandwidth.h;
            d["ssr0"] = report.ssr0;
            d["ssr1"] = report.ssr1;
            d["omega_measure"] = report.omega_measure;
            py::list results;
            for (const auto& r : report.results) results.append(outcome_dict(r));
            d["results"] = results;
            return d;
        },
        py::arg("y"), py::arg("x"), py::arg("tests") = "q,q0,glr", py::arg("kernel") = "uniform",
        py::arg("bandwidth") = "rot:2/9", py::arg("calibration") = "asymptotic", py::arg("b") = 99,
        py::arg("seed") = 0, py::arg("mode") = "conditional", py::arg("threads") = 1);

    m.def(
        "run_experiment_json",
        [](const std::string& config_or_preset, int reps, unsigned threads) {
            auto config = preset_config(config_or_preset);
            ExperimentConfig c = config ? *config : parse_config(config_or_preset);
            if (reps > 0) c.reps = reps;
            c.threads = threads;
            MCReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(c);
            }
            return report_to_json(report);
        },
        py::arg("config"), py::arg("reps") = 0, py::arg("threads") = 0);
}
