#include "npspec/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "npspec/errors.hpp"
#include "npspec/text.hpp"

namespace npspec {
namespace {

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd z(x.rows(), x.cols() + 1);
    z.col(0).setOnes();
    z.rightCols(x.cols()) = x;
    return z;
}

void check_calibration_inputs(const KernelConstants& constants, double h, int p, double omega_measure) {
    if (!(h > 0.0)) throw std::invalid_argument("calibration needs h > 0");
    if (!(omega_measure > 0.0)) throw std::invalid_argument("calibration needs a positive support measure");
    if (p != constants.p) {
        throw std::invalid_argument("kernel constants were lifted to p = " + std::to_string(constants.p) +
                                    " but the calibration asks for p = " + std::to_string(p));
    }
}

}  // namespace

LinearNullModel::LinearNullModel(const Eigen::MatrixXd& x) : design_(design_matrix(x)), qr_(design_) {
    if (qr_.rank() < design_.cols()) {
        throw DegenerateError("design matrix [1, X] is rank deficient (rank " + std::to_string(qr_.rank()) +
                              " < " + std::to_string(design_.cols()) + ")");
    }
}

NullFit LinearNullModel::fit(const Eigen::VectorXd& y) const {
    if (y.size() != design_.rows()) throw std::invalid_argument("response length does not match the design");
    NullFit out;
    out.theta_hat = qr_.solve(y);
    out.fitted = design_ * out.theta_hat;
    out.residuals = y - out.fitted;
    out.ssr0 = sum_of_squares(out.residuals);
    return out;
}

double sum_of_squares(const Eigen::VectorXd& v) {
    double ss = 0.0;
    for (Index t = 0; t < v.size(); ++t) ss += v[t] * v[t];
    return ss;
}

NullFit ols_fit(const Sample& sample) {
    if (sample.x.rows() != sample.y.size()) throw std::invalid_argument("response and regressors differ in length");
    return LinearNullModel(sample.x).fit(sample.y);
}

std::string_view to_string(TestMethod method) {
    switch (method) {
        case TestMethod::loss_q: return "q";
        case TestMethod::loss_q0: return "q0";
        case TestMethod::glr: return "glr";
        case TestMethod::f: return "f";
    }
    return "unknown";
}

std::optional<TestMethod> parse_test_method(std::string_view name) {
    for (auto m : {TestMethod::loss_q, TestMethod::loss_q0, TestMethod::glr, TestMethod::f}) {
        if (name == to_string(m)) return m;
    }
    return std::nullopt;
}

std::string TestSpec::label() const {
    std::string out(to_string(method));
    if (uses_loss()) out += "[" + to_string(loss) + "]";
    return out;
}

LossStatistic loss_statistic(const SmoothFit& fit, const LossSpec& loss, Denominator denominator, double ssr0,
                             Index n) {
    const double ssr = denominator == Denominator::ssr1 ? fit.ssr1 : ssr0;
    if (!(ssr > 0.0)) {
        throw DegenerateError(std::string("loss statistic denominator ") +
                              (denominator == Denominator::ssr1 ? "SSR1" : "SSR0") +
                              " is zero: the sample is fitted perfectly");
    }
    LossStatistic out;
    for (Index t = 0; t < fit.m_hat.size(); ++t) out.q_hat += loss_eval(loss, fit.m_hat[t]);
    out.q = out.q_hat / (ssr / static_cast<double>(n));
    return out;
}

double glr_statistic(double ssr0, double ssr1, Index n) {
    if (!(ssr0 > 0.0) || !(ssr1 > 0.0)) {
        throw DegenerateError("GLR statistic needs SSR0 > 0 and SSR1 > 0");
    }
    return 0.5 * static_cast<double>(n) * std::log(ssr0 / ssr1);
}

double f_statistic(double ssr0, double ssr1) {
    if (!(ssr1 > 0.0)) throw DegenerateError("F statistic needs SSR1 > 0");
    return (ssr0 - ssr1) / ssr1;
}

double compute_statistic(const TestSpec& test, const SmoothFit& fit, double ssr0, Index n) {
    switch (test.method) {
        case TestMethod::loss_q: return loss_statistic(fit, test.loss, Denominator::ssr1, ssr0, n).q;
        case TestMethod::loss_q0: return loss_statistic(fit, test.loss, Denominator::ssr0, ssr0, n).q;
        case TestMethod::glr: return glr_statistic(ssr0, fit.ssr1, n);
        case TestMethod::f: return f_statistic(ssr0, fit.ssr1);
    }
    throw std::invalid_argument("unknown test method");
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

TestOutcome asymptotic_calibration_q(double q, const KernelConstants& constants, double curvature, double h,
                                     int p, double omega_measure, TestMethod method) {
    check_calibration_inputs(constants, h, p, omega_measure);
    if (!(curvature > 0.0)) throw std::invalid_argument("loss curvature must be positive");
    if (method != TestMethod::loss_q && method != TestMethod::loss_q0) {
        throw std::invalid_argument("loss calibration applies to q and q0 only");
    }
    TestOutcome out;
    out.method = method;
    out.statistic = q;
    out.omega_measure = omega_measure;
    out.scale_factor = constants.a / (curvature * constants.b);
    const double nu = omega_measure * constants.a * constants.a / (std::pow(h, p) * constants.b);
    out.centering = nu;
    out.scaling = std::sqrt(2.0 * nu);
    out.z = (out.scale_factor * q - nu) / out.scaling;
    out.p_value = normal_upper_tail(out.z);
    return out;
}

TestOutcome asymptotic_calibration_glr(double lambda, const KernelConstants& constants, double h, int p,
                                       double omega_measure) {
    check_calibration_inputs(constants, h, p, omega_measure);
    TestOutcome out;
    out.method = TestMethod::glr;
    out.statistic = lambda;
    out.omega_measure = omega_measure;
    out.scale_factor = constants.c / constants.d;
    const double mu = omega_measure * constants.c * constants.c / (std::pow(h, p) * constants.d);
    out.centering = mu;
    out.scaling = std::sqrt(2.0 * mu);
    out.z = (out.scale_factor * lambda - mu) / out.scaling;
    out.p_value = normal_upper_tail(out.z);
    return out;
}

TestOutcome asymptotic_calibration_f(double f, Index n, const KernelConstants& constants, double h, int p,
                                     double omega_measure) {
    TestOutcome out =
        asymptotic_calibration_glr(0.5 * static_cast<double>(n) * f, constants, h, p, omega_measure);
    out.method = TestMethod::f;
    out.statistic = f;
    return out;
}

double estimate_omega(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw std::invalid_argument("support measure needs at least two observations");
    double omega = 1.0;
    for (Index j = 0; j < x.cols(); ++j) {
        const double range = x.col(j).maxCoeff() - x.col(j).minCoeff();
        if (!(range > 0.0)) {
            throw DegenerateError("regressor column " + std::to_string(j + 1) + " is constant");
        }
        omega *= range;
    }
    return omega;
}

}  // namespace npspec
