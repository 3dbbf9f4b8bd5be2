#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "npspec/bootstrap.hpp"
#include "npspec/fitting.hpp"
#include "npspec/kernels.hpp"
#include "npspec/smoothing.hpp"
#include "npspec/stats.hpp"

namespace npspec {

enum class Calibration { asymptotic, bootstrap, both };

std::string_view to_string(Calibration calibration);
std::optional<Calibration> parse_calibration(std::string_view name);

inline bool wants_asymptotic(Calibration c) { return c != Calibration::bootstrap; }
inline bool wants_bootstrap(Calibration c) { return c != Calibration::asymptotic; }

struct SpecTestConfig {
    std::vector<TestSpec> tests{TestSpec{}};
    KernelSpec kernel;
    BandwidthSelector bandwidth;
    Calibration calibration = Calibration::asymptotic;
    int b = 99;
    BootstrapMode mode = BootstrapMode::conditional;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::optional<double> omega_measure;  // replaces the range-based estimate
};

struct TestResult {
    TestSpec test;
    double statistic = 0.0;
    std::optional<TestOutcome> asymptotic;
    std::optional<BootstrapOutcome> bootstrap;
};

struct SpecTestReport {
    Index n = 0;
    int p = 1;
    KernelSpec kernel;
    BandwidthSelector selector;
    Bandwidth bandwidth;
    double omega_measure = 0.0;
    double ssr0 = 0.0;
    double ssr1 = 0.0;
    Calibration calibration = Calibration::asymptotic;
    int b = 0;
    BootstrapMode mode = BootstrapMode::conditional;
    std::uint64_t seed = 0;
    std::vector<TestResult> results;
};

/// Homoskedastic normal calibration of one statistic on a fitted sample.
TestOutcome calibrate_asymptotic(const TestSpec& test, double statistic, const FittedSample& fitted,
                                 double omega_measure);

/// All configured statistics on an already fitted sample. Omega defaults to
/// the product of coordinate ranges. Throws DegenerateError on a zero SSR.
SpecTestReport run_specification_test(const FittedSample& fitted, const SpecTestConfig& config);

SpecTestReport run_specification_test(const Sample& sample, const SpecTestConfig& config);

}  // namespace npspec
