#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "npspec/fitting.hpp"
#include "npspec/kernels.hpp"
#include "npspec/sample.hpp"
#include "npspec/smoothing.hpp"
#include "npspec/stats.hpp"

namespace npspec {

/// conditional: i.i.d. draws from the centered nonparametric residuals.
/// wild: each nonparametric residual times an independent Rademacher sign.
enum class BootstrapMode { conditional, wild };

std::string_view to_string(BootstrapMode mode);
std::optional<BootstrapMode> parse_bootstrap_mode(std::string_view name);

struct BootstrapConfig {
    int b = 99;
    BootstrapMode mode = BootstrapMode::conditional;
    std::uint64_t seed = 0;
    TestSpec statistic;
    KernelSpec kernel;
    BandwidthSelector bandwidth;
    unsigned threads = 1;  // 0 = hardware concurrency; results do not depend on it
};

struct BootstrapOutcome {
    double observed = 0.0;
    std::vector<double> replicates;
    double p_star = 1.0;  // share of replicates strictly above the observed value
};

/// (1/B) #{l : observed < replicates[l]}.
double bootstrap_p_value(double observed, std::span<const double> replicates);

/// p_star < alpha (strict).
bool bootstrap_reject(const BootstrapOutcome& outcome, double alpha);

/// Centered resampling pool for conditional mode.
Eigen::VectorXd centered_pool(const Eigen::VectorXd& residuals);

/// Draws bootstrap replicates on an already fitted sample.
///
/// Replicate l uses the stream derive_seed(seed, l) only, so its value does not
/// depend on the thread count or on which other replicates run. A replicate
/// whose resample is degenerate (zero SSR) is redrawn once from
/// derive_seed(derive_seed(seed, l), 1); a second failure throws DegenerateError.
/// All requested statistics are evaluated on the same resamples.
std::vector<BootstrapOutcome> bootstrap_fitted(const FittedSample& fitted, std::span<const TestSpec> tests,
                                               int b, BootstrapMode mode, std::uint64_t seed,
                                               unsigned threads = 1);

/// Steps 1-6 on a raw sample: least-squares null fit, smoothing with the
/// configured kernel and bandwidth (resolved once, reused for every
/// replicate), resampling, recomputation and the bootstrap p-value.
BootstrapOutcome conditional_bootstrap(const Sample& sample, const BootstrapConfig& config);

/// Several statistics on shared resamples; config.statistic is ignored.
std::vector<BootstrapOutcome> conditional_bootstrap(const Sample& sample, const BootstrapConfig& config,
                                                    std::span<const TestSpec> statistics);

}  // namespace npspec
