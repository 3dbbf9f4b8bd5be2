#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "npspec/kernels.hpp"
#include "npspec/quadrature.hpp"
#include "oracles.hpp"

using namespace npspec;

namespace {

constexpr std::array kFamilies{KernelFamily::uniform, KernelFamily::epanechnikov, KernelFamily::biweight,
                               KernelFamily::triweight};

std::string name_of(KernelFamily f) { return std::string(to_string(f)); }

// Exact rationals, frozen from symbolic integration of the polynomial pieces.
struct Exact {
    KernelFamily family;
    double a, t, b, c, d;
};

const std::array kExact{
    Exact{KernelFamily::uniform, 1.0 / 2, 3.0 / 8, 1.0 / 3, 1.0 / 4, 5.0 / 24},
    Exact{KernelFamily::epanechnikov, 3.0 / 5, 1269.0 / 2560, 167.0 / 385, 9.0 / 20, 8387.0 / 39424},
    Exact{KernelFamily::biweight, 5.0 / 7, 237525.0 / 401408, 1168780.0 / 2263261, 65.0 / 112,
          4665929295.0 / 18540634112.0},
    Exact{KernelFamily::triweight, 350.0 / 429, 101158085.0 / 149946368, 151766930.0 / 258150321,
          9415.0 / 13728, 6000946648025.0 / 20822325460992.0},
};

}  // namespace

TEST(Kernel, PointValues) {
    EXPECT_DOUBLE_EQ(eval_kernel({KernelFamily::uniform}, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(eval_kernel({KernelFamily::uniform}, 1.5), 0.0);
    EXPECT_DOUBLE_EQ(eval_kernel({KernelFamily::uniform}, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(eval_kernel({KernelFamily::epanechnikov}, 0.0), 0.75);
    EXPECT_DOUBLE_EQ(eval_kernel({KernelFamily::biweight}, 0.0), 15.0 / 16.0);
    EXPECT_DOUBLE_EQ(eval_kernel({KernelFamily::triweight}, 0.0), 35.0 / 32.0);
}

TEST(Kernel, SymmetricBoundedAgainstOracle) {
    for (auto f : kFamilies) {
        for (double u = -1.3; u <= 1.3; u += 0.01) {
            const double k = eval_kernel({f}, u);
            EXPECT_EQ(k, eval_kernel({f}, -u));
            EXPECT_GE(k, 0.0);
            EXPECT_NEAR(k, oracle::kernel(name_of(f), u), 1e-15) << name_of(f) << " u=" << u;
        }
    }
}

TEST(Kernel, UnitMass) {
    for (auto f : kFamilies) EXPECT_NEAR(kernel_mass({f}, 1e-10), 1.0, 1e-8) << name_of(f);
}

TEST(Kernel, ProductKernel) {
    const KernelSpec uni{KernelFamily::uniform};
    const std::vector<double> origin{0.0, 0.0};
    const std::vector<double> outside{0.0, 2.0};
    const std::vector<double> one{0.0};
    EXPECT_DOUBLE_EQ(eval_product_kernel(uni, origin), 0.25);
    EXPECT_DOUBLE_EQ(eval_product_kernel(uni, outside), 0.0);
    EXPECT_DOUBLE_EQ(eval_product_kernel({KernelFamily::epanechnikov}, one), 0.75);
    EXPECT_THROW(eval_product_kernel(uni, std::vector<double>{}), std::invalid_argument);
}

TEST(Kernel, SelfConvolutionClosedForms) {
    EXPECT_NEAR(self_convolution({KernelFamily::uniform}, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(self_convolution({KernelFamily::uniform}, 2.0), 0.0, 1e-15);
    EXPECT_NEAR(self_convolution({KernelFamily::epanechnikov}, 0.0), 0.6, 1e-15);
    for (auto f : kFamilies) {
        for (double u = -2.2; u <= 2.2; u += 0.05) {
            EXPECT_NEAR(self_convolution({f}, u), oracle::convolution(name_of(f), u), 1e-11)
                << name_of(f) << " u=" << u;
        }
    }
}

TEST(KernelConstants, MatchFrozenRationals) {
    for (const auto& e : kExact) {
        const auto k = kernel_constants({e.family});
        EXPECT_NEAR(k.a, e.a, 1e-9) << name_of(e.family);
        EXPECT_NEAR(k.t, e.t, 1e-9) << name_of(e.family);
        EXPECT_NEAR(k.b, e.b, 1e-9) << name_of(e.family);
        EXPECT_NEAR(k.c, e.c, 1e-9) << name_of(e.family);
        EXPECT_NEAR(k.d, e.d, 1e-9) << name_of(e.family);
    }
}

TEST(KernelConstants, MatchSimpsonOracle) {
    for (auto f : kFamilies) {
        const auto k = kernel_constants({f});
        const auto o = oracle::constants(name_of(f));
        EXPECT_NEAR(k.a, o.a, 1e-9) << name_of(f);
        EXPECT_NEAR(k.t, o.t, 1e-9) << name_of(f);
        EXPECT_NEAR(k.b, o.b, 1e-9) << name_of(f);
        EXPECT_NEAR(k.d, o.d, 1e-9) << name_of(f);
    }
}

TEST(KernelConstants, AlgebraicIdentities) {
    for (auto f : kFamilies) {
        const auto k = kernel_constants({f});
        EXPECT_NEAR(k.d, k.a - k.t + k.b / 4.0, 1e-9) << name_of(f);
        EXPECT_GE(k.a, k.t) << name_of(f);
        EXPECT_LE(k.b, k.a) << name_of(f);
        EXPECT_GE(4.0 * k.d - k.b, -10.0 * k.tol) << name_of(f);
        EXPECT_NEAR(efficiency_numerator({f}), 4.0 * k.d, 10.0 * kDefaultQuadratureTol) << name_of(f);
    }
}

TEST(KernelConstants, ProductLift) {
    const auto k2 = kernel_constants({KernelFamily::uniform}, 2);
    EXPECT_NEAR(k2.a, 0.25, 1e-12);
    EXPECT_NEAR(k2.b, 1.0 / 9.0, 1e-12);
    EXPECT_NEAR(k2.c, 0.25 - 0.125, 1e-12);
    EXPECT_NEAR(k2.d, 0.25 - 9.0 / 64.0 + 1.0 / 36.0, 1e-12);
    EXPECT_NEAR(k2.d, 0.1371528, 1e-7);
    EXPECT_EQ(k2.p, 2);
    const auto k3 = kernel_constants({KernelFamily::biweight}, 3);
    const auto b1 = kernel_constants({KernelFamily::biweight}, 1);
    EXPECT_NEAR(k3.a, std::pow(b1.a, 3), 1e-13);
    EXPECT_NEAR(k3.c, std::pow(15.0 / 16.0, 3) - std::pow(b1.a, 3) / 2.0, 1e-13);
}

TEST(KernelConstants, TwoDimensionalQuadratureOracle) {
    // a_2 = iint K(u)^2 K(v)^2 and b_2 = iint (K*K)(u)^2 (K*K)(v)^2 by nested Simpson.
    for (auto f : {KernelFamily::epanechnikov, KernelFamily::biweight}) {
        const std::string name = name_of(f);
        const auto inner_a = [&](double u) {
            const double ku = oracle::kernel(name, u);
            return oracle::simpson_pieces(
                [&](double v) {
                    const double kv = oracle::kernel(name, v);
                    return ku * ku * kv * kv;
                },
                {-1.0, 0.0, 1.0}, 1e-13);
        };
        const double a2 = oracle::simpson_pieces(inner_a, {-1.0, 0.0, 1.0}, 1e-12);
        const auto k2 = kernel_constants({f}, 2);
        EXPECT_NEAR(k2.a, a2, 100 * kDefaultQuadratureTol) << name;

        // The 2-D b integrand factorises, so tabulate the 1-D convolution once.
        const auto kk2 = [&](double u) {
            const double c = oracle::convolution(name, u);
            return c * c;
        };
        const double b1 = oracle::simpson_pieces(kk2, {-2.0, -1.0, 0.0, 1.0, 2.0}, 1e-12);
        const double b2 = oracle::simpson_pieces([&](double u) { return kk2(u) * b1; }, {-2.0, -1.0, 0.0, 1.0, 2.0},
                                                 1e-12);
        EXPECT_NEAR(k2.b, b2, 100 * kDefaultQuadratureTol) << name;
    }
}

TEST(KernelConstants, CachedAndThreadSafe) {
    const auto first = kernel_constants({KernelFamily::triweight}, 2, 1e-9);
    std::vector<KernelConstants> seen(8);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < seen.size(); ++i) {
        pool.emplace_back([&, i] { seen[i] = kernel_constants({KernelFamily::triweight}, 2, 1e-9); });
    }
    for (auto& t : pool) t.join();
    for (const auto& s : seen) EXPECT_EQ(s, first);
}

TEST(KernelConstants, RejectsBadArguments) {
    EXPECT_THROW(kernel_constants({KernelFamily::uniform}, 0), std::invalid_argument);
    EXPECT_THROW(kernel_constants({KernelFamily::uniform}, 1, 0.0), std::invalid_argument);
}

TEST(Quadrature, ReportsNonConvergence) {
    const auto r = quadrature::integrate([](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-300); }, -1.0, 1.0,
                                         1e-14, 8);
    EXPECT_FALSE(r.converged);
}

TEST(Quadrature, PolynomialExact) {
    const auto r = quadrature::integrate([](double x) { return x * x * x * x; }, 0.0, 2.0, 1e-13);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 32.0 / 5.0, 1e-13);
}
