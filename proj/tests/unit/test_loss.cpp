#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "npspec/loss.hpp"

using namespace npspec;

namespace {

// Series oracle for linex, summed until terms vanish: (beta/alpha^2) sum_{k>=2} (alpha z)^k / k!
double linex_series(double alpha, double beta, double z) {
    const double x = alpha * z;
    double term = x * x / 2.0;
    double sum = 0.0;
    for (int k = 2; k < 200 && std::abs(term) > 1e-300; ++k) {
        sum += term;
        term *= x / (k + 1);
    }
    return beta * sum / (alpha * alpha);
}

}  // namespace

TEST(Loss, SpecExamples) {
    EXPECT_DOUBLE_EQ(loss_eval(QuadraticLoss{}, 2.0), 4.0);
    EXPECT_NEAR(loss_eval(LinexLoss{1.0, 1.0}, 1.0), std::exp(1.0) - 2.0, 1e-15);
    EXPECT_NEAR(loss_eval(LinexLoss{1.0, 1.0}, 1.0), 0.7182818, 1e-7);
    EXPECT_DOUBLE_EQ(loss_eval(TruncatedQuadraticLoss{1.0}, 2.0), 1.5);
    EXPECT_DOUBLE_EQ(loss_eval(LinexLoss{0.0, 1.0}, 3.0), 4.5);
}

TEST(Loss, TruncatedQuadraticPieces) {
    const TruncatedQuadraticLoss tq{1.0};
    EXPECT_DOUBLE_EQ(loss_eval(tq, 0.5), 0.125);
    EXPECT_DOUBLE_EQ(loss_eval(tq, -2.0), 1.5);
    EXPECT_DOUBLE_EQ(loss_eval(tq, 1.0), 0.5);
}

TEST(Loss, LinexAgreesWithSeries) {
    for (double alpha : {-1.0, -0.2, 0.2, 0.5, 1.0}) {
        for (double z : {-3.0, -0.7, -1e-3, 1e-3, 0.4, 2.5}) {
            const double expect = linex_series(alpha, 2.0, z);
            EXPECT_NEAR(loss_eval(LinexLoss{alpha, 2.0}, z), expect, 1e-12 * std::max(1.0, expect))
                << alpha << " " << z;
        }
    }
}

TEST(Loss, LinexAccurateAroundSeriesCutoff) {
    // Either side of |alpha z| = 1e-4 the value must match the series oracle;
    // above the cutoff the direct formula loses about eps/(alpha z)^2 to cancellation.
    for (double alpha : {0.5e-4, 0.99e-4, 1.01e-4, 2e-4}) {
        EXPECT_NEAR(loss_eval(LinexLoss{alpha, 1.0}, 1.0), linex_series(alpha, 1.0, 1.0), 1e-7) << alpha;
    }
    EXPECT_NEAR(loss_eval(LinexLoss{1e-9, 1.0}, 1.0), 0.5, 1e-9);
}

TEST(Loss, LinexConvergesToQuadraticLimit) {
    double previous = std::numeric_limits<double>::infinity();
    for (double alpha : {0.5, 0.1, 0.01, 0.001}) {
        const double gap = std::abs(loss_eval(LinexLoss{alpha, 1.0}, 1.5) - 1.125);
        EXPECT_LT(gap, previous);
        previous = gap;
    }
}

TEST(Loss, LinexSaturation) {
    const auto big = loss_eval_checked(LinexLoss{1.0, 1.0}, 1000.0);
    EXPECT_TRUE(big.saturated);
    EXPECT_TRUE(std::isinf(big.value));
    const auto fine = loss_eval_checked(LinexLoss{1.0, 1.0}, 1.0);
    EXPECT_FALSE(fine.saturated);
    // Large negative arguments stay finite: the exponential underflows to 0.
    EXPECT_FALSE(loss_eval_checked(LinexLoss{1.0, 1.0}, -1000.0).saturated);
}

TEST(Loss, Curvature) {
    EXPECT_DOUBLE_EQ(loss_curvature(QuadraticLoss{}), 1.0);
    EXPECT_DOUBLE_EQ(loss_curvature(LinexLoss{0.5, 1.0}), 0.5);
    EXPECT_DOUBLE_EQ(loss_curvature(TruncatedQuadraticLoss{1.0}), 0.5);
    // Finite-difference oracle at step 1e-5.
    const double step = 1e-5;
    const LinexLoss lx{0.5, 1.0};
    const double fd = (loss_eval(lx, step) - 2.0 * loss_eval(lx, 0.0) + loss_eval(lx, -step)) / (step * step);
    EXPECT_NEAR(fd / 2.0, 0.5, 1e-4);
}

TEST(Loss, Validation) {
    EXPECT_TRUE(validate_loss(QuadraticLoss{}).ok());
    EXPECT_TRUE(validate_loss(LinexLoss{1.0, 1.0}).ok());
    EXPECT_TRUE(validate_loss(LinexLoss{-0.5, 1.0}).ok());
    EXPECT_TRUE(validate_loss(TruncatedQuadraticLoss{0.1}).ok());
    const auto v = validate_loss(LinexLoss{1.0, 1.0});
    EXPECT_NEAR(v.first_derivative, 0.0, 1e-8);
    EXPECT_NEAR(v.second_derivative, 1.0, 1e-3);
}

TEST(Loss, CheckRejectsBadParameters) {
    EXPECT_THROW(check_loss(TruncatedQuadraticLoss{0.0}), std::invalid_argument);
    EXPECT_THROW(check_loss(TruncatedQuadraticLoss{-1.0}), std::invalid_argument);
    EXPECT_THROW(check_loss(LinexLoss{1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(check_loss(LinexLoss{std::nan(""), 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(check_loss(LinexLoss{0.0, 1.0}));
}

TEST(Loss, Descriptors) {
    EXPECT_EQ(to_string(LossSpec{QuadraticLoss{}}), "quadratic");
    EXPECT_EQ(to_string(LossSpec{TruncatedQuadraticLoss{1.0}}), "tq:1");
    EXPECT_EQ(to_string(LossSpec{LinexLoss{0.5, 1.0}}), "linex:0.5,1");
}

TEST(Loss, NonNegativeAndZeroAtOrigin) {
    const LossSpec losses[] = {QuadraticLoss{}, TruncatedQuadraticLoss{0.3}, LinexLoss{-1.0, 2.0}, LinexLoss{0.0, 1.0}};
    for (const auto& l : losses) {
        EXPECT_EQ(loss_eval(l, 0.0), 0.0);
        for (double z = -4.0; z <= 4.0; z += 0.125) EXPECT_GE(loss_eval(l, z), 0.0);
    }
}
