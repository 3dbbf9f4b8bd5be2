#include "npspec/bootstrap.hpp"

#include <stdexcept>
#include <string>

#include <boost/random/uniform_int_distribution.hpp>

#include "npspec/errors.hpp"
#include "npspec/parallel.hpp"
#include "npspec/rng.hpp"

namespace npspec {
namespace {

Eigen::VectorXd draw_errors(const Eigen::VectorXd& np_residuals, const Eigen::VectorXd& pool, BootstrapMode mode,
                            std::uint64_t stream) {
    rng::Xoshiro256 gen(stream);
    const Index n = np_residuals.size();
    Eigen::VectorXd out(n);
    if (mode == BootstrapMode::conditional) {
        boost::random::uniform_int_distribution<Index> pick(0, n - 1);
        for (Index t = 0; t < n; ++t) out[t] = pool[pick(gen)];
    } else {
        for (Index t = 0; t < n; ++t) out[t] = np_residuals[t] * gen.rademacher();
    }
    return out;
}

// Statistics on one resample, or nullopt if any of them is undefined.
std::optional<std::vector<double>> replicate_statistics(const FittedSample& fitted, std::span<const TestSpec> tests,
                                                        const Eigen::VectorXd& errors) {
    const Eigen::VectorXd y_star = fitted.null_fit.fitted + errors;
    NullFit null_star;
    if (fitted.null_model) {
        null_star = fitted.null_model->fit(y_star);
    } else {
        null_star.residuals = errors;
        null_star.ssr0 = sum_of_squares(errors);
    }
    const SmoothFit smooth = fitted.smoother.fit(null_star.residuals);
    std::vector<double> out;
    out.reserve(tests.size());
    try {
        for (const auto& test : tests) out.push_back(compute_statistic(test, smooth, null_star.ssr0, fitted.n()));
    } catch (const DegenerateError&) {
        return std::nullopt;
    }
    return out;
}

}  // namespace

std::string_view to_string(BootstrapMode mode) {
    return mode == BootstrapMode::conditional ? "conditional" : "wild";
}

std::optional<BootstrapMode> parse_bootstrap_mode(std::string_view name) {
    if (name == "conditional") return BootstrapMode::conditional;
    if (name == "wild") return BootstrapMode::wild;
    return std::nullopt;
}

double bootstrap_p_value(double observed, std::span<const double> replicates) {
    if (replicates.empty()) throw std::invalid_argument("bootstrap p-value needs at least one replicate");
    std::size_t above = 0;
    for (double r : replicates) {
        if (observed < r) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(replicates.size());
}

bool bootstrap_reject(const BootstrapOutcome& outcome, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("significance level must lie in (0, 1)");
    return outcome.p_star < alpha;
}

Eigen::VectorXd centered_pool(const Eigen::VectorXd& residuals) {
    double mean = 0.0;
    for (Index t = 0; t < residuals.size(); ++t) mean += residuals[t];
    mean /= static_cast<double>(residuals.size());
    return residuals.array() - mean;
}

std::vector<BootstrapOutcome> bootstrap_fitted(const FittedSample& fitted, std::span<const TestSpec> tests, int b,
                                               BootstrapMode mode, std::uint64_t seed, unsigned threads) {
    if (b < 1) throw std::invalid_argument("bootstrap needs at least one replicate");
    if (tests.empty()) throw std::invalid_argument("bootstrap needs at least one statistic");

    std::vector<BootstrapOutcome> outcomes(tests.size());
    for (std::size_t k = 0; k < tests.size(); ++k) {
        outcomes[k].observed =
            compute_statistic(tests[k], fitted.smooth, fitted.null_fit.ssr0, fitted.n());
        outcomes[k].replicates.assign(static_cast<std::size_t>(b), 0.0);
    }

    const Eigen::VectorXd np_residuals = fitted.nonparametric_residuals();
    const Eigen::VectorXd pool = centered_pool(np_residuals);

    parallel_for(static_cast<std::size_t>(b), threads, [&](std::size_t l) {
        const std::uint64_t stream = rng::derive_seed(seed, l);
        auto values = replicate_statistics(fitted, tests, draw_errors(np_residuals, pool, mode, stream));
        if (!values) {
            values = replicate_statistics(fitted, tests,
                                          draw_errors(np_residuals, pool, mode, rng::derive_seed(stream, 1)));
        }
        if (!values) {
            throw DegenerateError("bootstrap replicate " + std::to_string(l) +
                                  " was degenerate (zero SSR) twice in a row");
        }
        for (std::size_t k = 0; k < tests.size(); ++k) outcomes[k].replicates[l] = (*values)[k];
    });

    for (auto& o : outcomes) o.p_star = bootstrap_p_value(o.observed, o.replicates);
    return outcomes;
}

std::vector<BootstrapOutcome> conditional_bootstrap(const Sample& sample, const BootstrapConfig& config,
                                                    std::span<const TestSpec> statistics) {
    const FittedSample fitted = fit_sample(sample, config.kernel, config.bandwidth);
    return bootstrap_fitted(fitted, statistics, config.b, config.mode, config.seed, config.threads);
}

BootstrapOutcome conditional_bootstrap(const Sample& sample, const BootstrapConfig& config) {
    const TestSpec tests[] = {config.statistic};
    return conditional_bootstrap(sample, config, tests).front();
}

}  // namespace npspec
