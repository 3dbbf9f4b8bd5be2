#pragma once

#include <string>
#include <variant>

namespace npspec {

/// d(z) = z^2
struct QuadraticLoss {
    friend bool operator==(const QuadraticLoss&, const QuadraticLoss&) = default;
};

/// d(z) = z^2/2 for |z| <= c, c|z| - c^2/2 beyond. Not twice differentiable at
/// |z| = c; only the behavior at the origin matters for the test.
struct TruncatedQuadraticLoss {
    double c = 1.0;
    friend bool operator==(const TruncatedQuadraticLoss&, const TruncatedQuadraticLoss&) = default;
};

/// d(z) = (beta/alpha^2) [exp(alpha z) - 1 - alpha z]; alpha = 0 is the
/// quadratic limit beta z^2 / 2.
struct LinexLoss {
    double alpha = 0.0;
    double beta = 1.0;
    friend bool operator==(const LinexLoss&, const LinexLoss&) = default;
};

using LossSpec = std::variant<QuadraticLoss, TruncatedQuadraticLoss, LinexLoss>;

/// Throws std::invalid_argument unless c > 0 (truncated) or beta > 0 (linex),
/// with all parameters finite.
void check_loss(const LossSpec& loss);

/// Canonical descriptor: `quadratic`, `tq:<c>`, `linex:<alpha>,<beta>`.
std::string to_string(const LossSpec& loss);

struct LossValue {
    double value = 0.0;
    bool saturated = false;  // linex exp overflowed; value is +inf
};

double loss_eval(const LossSpec& loss, double z);
LossValue loss_eval_checked(const LossSpec& loss, double z);

/// D = d''(0)/2: 1 (quadratic), 1/2 (truncated quadratic), beta/2 (linex).
double loss_curvature(const LossSpec& loss);

struct LossValidation {
    bool zero_at_origin = false;      // d(0) == 0
    bool flat_at_origin = false;      // |d'(0)| <= 1e-8 by central difference
    bool positive_curvature = false;  // d''(0) > 0 by central difference
    bool monotone = false;            // nondecreasing in |z| on a symmetric grid
    double first_derivative = 0.0;
    double second_derivative = 0.0;

    bool ok() const { return zero_at_origin && flat_at_origin && positive_curvature && monotone; }
};

/// Numerical check of the admissibility conditions. Failures are reported,
/// never thrown.
LossValidation validate_loss(const LossSpec& loss);

}  // namespace npspec
