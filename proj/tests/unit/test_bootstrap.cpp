#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "npspec/bootstrap.hpp"
#include "npspec/dgp.hpp"
#include "npspec/errors.hpp"

using namespace npspec;

namespace {

Sample null_sample(Index n, std::uint64_t seed) {
    DGPSpec spec;
    spec.n = n;
    spec.seed = seed;
    return gen_sample(spec);
}

BootstrapConfig config(std::uint64_t seed, unsigned threads, BootstrapMode mode = BootstrapMode::conditional) {
    BootstrapConfig c;
    c.b = 49;
    c.seed = seed;
    c.threads = threads;
    c.mode = mode;
    c.statistic = TestSpec{TestMethod::loss_q, QuadraticLoss{}};
    return c;
}

const std::vector<TestSpec> kTests{{TestMethod::loss_q, QuadraticLoss{}},
                                   {TestMethod::loss_q0, LinexLoss{0.5, 1.0}},
                                   {TestMethod::glr},
                                   {TestMethod::f}};

}  // namespace

TEST(BootstrapPValue, StrictCount) {
    const std::vector<double> reps{1.0, 2.0, 3.0, 4.0};
    EXPECT_EQ(bootstrap_p_value(5.0, reps), 0.0);
    EXPECT_EQ(bootstrap_p_value(3.0, reps), 0.25);  // the tie does not count
    EXPECT_EQ(bootstrap_p_value(0.0, reps), 1.0);
    EXPECT_THROW(bootstrap_p_value(0.0, std::vector<double>{}), std::invalid_argument);
}

TEST(BootstrapReject, StrictLevel) {
    BootstrapOutcome o;
    o.p_star = 0.04;
    EXPECT_TRUE(bootstrap_reject(o, 0.05));
    o.p_star = 0.05;
    EXPECT_FALSE(bootstrap_reject(o, 0.05));
    o.p_star = 1.0;
    EXPECT_FALSE(bootstrap_reject(o, 0.99));
    EXPECT_THROW(bootstrap_reject(o, 0.0), std::invalid_argument);
}

TEST(Bootstrap, CenteredPool) {
    Eigen::VectorXd r(4);
    r << 1.0, 2.0, 3.0, 10.0;
    const auto pool = centered_pool(r);
    EXPECT_NEAR(pool.sum(), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(pool(3), 6.0);
}

TEST(Bootstrap, DeterministicForSeed) {
    const auto s = null_sample(80, 5);
    const auto a = conditional_bootstrap(s, config(42, 1));
    const auto b = conditional_bootstrap(s, config(42, 1));
    EXPECT_EQ(a.replicates, b.replicates);
    EXPECT_EQ(a.p_star, b.p_star);
    const auto c = conditional_bootstrap(s, config(43, 1));
    EXPECT_NE(a.replicates, c.replicates);
}

TEST(Bootstrap, IndependentOfThreadCount) {
    const auto s = null_sample(90, 6);
    for (auto mode : {BootstrapMode::conditional, BootstrapMode::wild}) {
        const auto one = conditional_bootstrap(s, config(7, 1, mode), kTests);
        for (unsigned threads : {2u, 4u, 0u}) {
            const auto many = conditional_bootstrap(s, config(7, threads, mode), kTests);
            ASSERT_EQ(one.size(), many.size());
            for (std::size_t k = 0; k < one.size(); ++k) {
                EXPECT_EQ(one[k].replicates, many[k].replicates);
                EXPECT_EQ(one[k].p_star, many[k].p_star);
            }
        }
    }
}

TEST(Bootstrap, SharedResamplesMatchSingleRuns) {
    const auto s = null_sample(70, 8);
    const auto joint = conditional_bootstrap(s, config(11, 1), kTests);
    for (std::size_t k = 0; k < kTests.size(); ++k) {
        auto c = config(11, 1);
        c.statistic = kTests[k];
        EXPECT_EQ(conditional_bootstrap(s, c).replicates, joint[k].replicates);
    }
}

TEST(Bootstrap, PValueOnLattice) {
    const auto s = null_sample(60, 9);
    auto c = config(3, 1);
    c.b = 19;
    const auto out = conditional_bootstrap(s, c);
    EXPECT_EQ(out.replicates.size(), 19u);
    const double scaled = out.p_star * 19.0;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
    EXPECT_GE(out.p_star, 0.0);
    EXPECT_LE(out.p_star, 1.0);
}

TEST(Bootstrap, StrongAlternativeGivesZeroPValue) {
    DGPSpec spec;
    spec.model = Model::p1_quadratic;
    spec.theta = 1.0;
    spec.n = 300;
    spec.seed = 12;
    const auto s = gen_sample(spec);
    const std::vector<TestSpec> tests{{TestMethod::loss_q, QuadraticLoss{}}, {TestMethod::glr}};
    const auto out = conditional_bootstrap(s, config(1, 1), tests);
    for (const auto& o : out) EXPECT_EQ(o.p_star, 0.0);
}

TEST(Bootstrap, ResidualInjectionKeepsNullFixed) {
    const auto s = null_sample(60, 10);
    const auto fitted = fit_residuals(s.y.array() - 1.0 - s.x.col(0).array(), s.x, {KernelFamily::uniform},
                                      BandwidthSelector{});
    EXPECT_FALSE(fitted.null_model.has_value());
    const auto out = bootstrap_fitted(fitted, kTests, 29, BootstrapMode::wild, 5, 1);
    for (const auto& o : out) EXPECT_EQ(o.replicates.size(), 29u);
    const auto again = bootstrap_fitted(fitted, kTests, 29, BootstrapMode::wild, 5, 3);
    for (std::size_t k = 0; k < out.size(); ++k) EXPECT_EQ(out[k].replicates, again[k].replicates);
}

TEST(Bootstrap, RejectsBadArguments) {
    const auto s = null_sample(40, 1);
    auto c = config(1, 1);
    c.b = 0;
    EXPECT_THROW(conditional_bootstrap(s, c), std::invalid_argument);
    EXPECT_EQ(parse_bootstrap_mode("wild"), BootstrapMode::wild);
    EXPECT_FALSE(parse_bootstrap_mode("pairs").has_value());
}
