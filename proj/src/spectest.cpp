#include "npspec/spectest.hpp"

#include <stdexcept>

namespace npspec {

std::string_view to_string(Calibration calibration) {
    switch (calibration) {
        case Calibration::asymptotic: return "asymptotic";
        case Calibration::bootstrap: return "bootstrap";
        case Calibration::both: return "both";
    }
    return "unknown";
}

std::optional<Calibration> parse_calibration(std::string_view name) {
    if (name == "asymptotic") return Calibration::asymptotic;
    if (name == "bootstrap") return Calibration::bootstrap;
    if (name == "both") return Calibration::both;
    return std::nullopt;
}

TestOutcome calibrate_asymptotic(const TestSpec& test, double statistic, const FittedSample& fitted,
                                 double omega_measure) {
    const KernelConstants constants = kernel_constants(fitted.kernel, fitted.p());
    const double h = fitted.bandwidth.h;
    switch (test.method) {
        case TestMethod::loss_q:
        case TestMethod::loss_q0:
            return asymptotic_calibration_q(statistic, constants, loss_curvature(test.loss), h, fitted.p(),
                                            omega_measure, test.method);
        case TestMethod::glr:
            return asymptotic_calibration_glr(statistic, constants, h, fitted.p(), omega_measure);
        case TestMethod::f:
            return asymptotic_calibration_f(statistic, fitted.n(), constants, h, fitted.p(), omega_measure);
    }
    throw std::logic_error("unhandled test method");
}

SpecTestReport run_specification_test(const FittedSample& fitted, const SpecTestConfig& config) {
    if (config.tests.empty()) throw std::invalid_argument("no tests requested");
    for (const auto& t : config.tests) {
        if (t.uses_loss()) check_loss(t.loss);
    }
    if (config.omega_measure && !(*config.omega_measure > 0.0)) {
        throw std::invalid_argument("support measure must be positive");
    }

    SpecTestReport report;
    report.n = fitted.n();
    report.p = fitted.p();
    report.kernel = fitted.kernel;
    report.selector = config.bandwidth;
    report.bandwidth = fitted.bandwidth;
    report.ssr0 = fitted.null_fit.ssr0;
    report.ssr1 = fitted.smooth.ssr1;
    report.calibration = config.calibration;
    report.mode = config.mode;
    report.seed = config.seed;
    report.omega_measure = config.omega_measure.value_or(estimate_omega(fitted.coordinates));

    for (const auto& test : config.tests) {
        TestResult r;
        r.test = test;
        r.statistic = compute_statistic(test, fitted.smooth, fitted.null_fit.ssr0, fitted.n());
        if (wants_asymptotic(config.calibration)) {
            r.asymptotic = calibrate_asymptotic(test, r.statistic, fitted, report.omega_measure);
        }
        report.results.push_back(std::move(r));
    }

    if (wants_bootstrap(config.calibration)) {
        report.b = config.b;
        auto outcomes = bootstrap_fitted(fitted, config.tests, config.b, config.mode, config.seed, config.threads);
        for (std::size_t k = 0; k < outcomes.size(); ++k) report.results[k].bootstrap = std::move(outcomes[k]);
    }
    return report;
}

SpecTestReport run_specification_test(const Sample& sample, const SpecTestConfig& config) {
    return run_specification_test(fit_sample(sample, config.kernel, config.bandwidth), config);
}

}  // namespace npspec
