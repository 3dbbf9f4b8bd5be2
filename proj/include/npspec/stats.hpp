#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "npspec/kernels.hpp"
#include "npspec/loss.hpp"
#include "npspec/sample.hpp"
#include "npspec/smoothing.hpp"

namespace npspec {

/// Least-squares fit of the linear null model y = [1, x] theta + e.
struct NullFit {
    Eigen::VectorXd theta_hat;  // intercept first, then slopes
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    double ssr0 = 0.0;
};

/// Linear null model with the QR factorisation of [1, x] precomputed, so
/// refitting many responses on the same design is cheap.
class LinearNullModel {
public:
    /// Throws DegenerateError if [1, x] is rank deficient.
    explicit LinearNullModel(const Eigen::MatrixXd& x);

    NullFit fit(const Eigen::VectorXd& y) const;

    Index size() const { return design_.rows(); }

private:
    Eigen::MatrixXd design_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

NullFit ols_fit(const Sample& sample);

/// Sum of squares accumulated left to right (fixed order, unlike Eigen reductions).
double sum_of_squares(const Eigen::VectorXd& v);

enum class TestMethod {
    loss_q,   // Q_hat / (SSR1 / n)
    loss_q0,  // Q_hat / (SSR0 / n)
    glr,      // (n/2) ln(SSR0 / SSR1)
    f,        // (SSR0 - SSR1) / SSR1
};

std::string_view to_string(TestMethod method);
std::optional<TestMethod> parse_test_method(std::string_view name);

/// A requested test: the method, plus the loss for the two loss-based methods.
struct TestSpec {
    TestMethod method = TestMethod::loss_q;
    LossSpec loss = QuadraticLoss{};

    bool uses_loss() const { return method == TestMethod::loss_q || method == TestMethod::loss_q0; }
    /// `q[linex:0.2,1]`, `q0[quadratic]`, `glr`, `f`.
    std::string label() const;

    friend bool operator==(const TestSpec&, const TestSpec&) = default;
};

enum class Denominator { ssr1, ssr0 };

struct LossStatistic {
    double q_hat = 0.0;  // sum_t d(m_hat_t)
    double q = 0.0;      // q_hat / (SSR / n)
};

/// Throws DegenerateError if the chosen SSR is not strictly positive.
LossStatistic loss_statistic(const SmoothFit& fit, const LossSpec& loss, Denominator denominator, double ssr0,
                             Index n);

/// (n/2) ln(ssr0/ssr1); may be negative. Throws DegenerateError unless both SSRs are positive.
double glr_statistic(double ssr0, double ssr1, Index n);

/// (ssr0 - ssr1)/ssr1. Throws DegenerateError unless ssr1 > 0.
double f_statistic(double ssr0, double ssr1);

/// Value of the requested statistic from a null fit and its smoothed residuals.
double compute_statistic(const TestSpec& test, const SmoothFit& fit, double ssr0, Index n);

/// Standardized statistic with its normal upper-tail p-value.
struct TestOutcome {
    TestMethod method = TestMethod::loss_q;
    double statistic = 0.0;
    std::optional<double> centering;  // nu_n or mu_n
    double scale_factor = 1.0;        // s(K) or r(K)
    double scaling = 1.0;             // sqrt(2 nu_n) or sqrt(2 mu_n)
    double z = 0.0;
    double p_value = 0.5;
    double omega_measure = 1.0;
};

/// 1 - Phi(z).
double normal_upper_tail(double z);

/// Homoskedastic calibration of q_n (or q_n^0):
///   s = a_p/(D b_p), nu = Omega a_p^2/(h^p b_p), z = (s q - nu)/sqrt(2 nu).
TestOutcome asymptotic_calibration_q(double q, const KernelConstants& constants, double curvature, double h,
                                     int p, double omega_measure, TestMethod method = TestMethod::loss_q);

/// Homoskedastic calibration of lambda_n:
///   r = c_p/d_p, mu = Omega c_p^2/(h^p d_p), z = (r lambda - mu)/sqrt(2 mu).
TestOutcome asymptotic_calibration_glr(double lambda, const KernelConstants& constants, double h, int p,
                                       double omega_measure);

/// The F statistic through lambda_n ~ (n/2) F, then calibrated as lambda_n.
TestOutcome asymptotic_calibration_f(double f, Index n, const KernelConstants& constants, double h, int p,
                                     double omega_measure);

/// Product over columns of (max - min): the measure of the regressor support.
/// Throws DegenerateError on a constant column.
double estimate_omega(const Eigen::MatrixXd& x);

}  // namespace npspec
