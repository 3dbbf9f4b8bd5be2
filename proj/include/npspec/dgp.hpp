#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "npspec/sample.hpp"

namespace npspec {

/// Error laws; the last three are standardized to mean 0 and variance 1,
/// Student t5 is used as drawn (variance 5/3).
enum class ErrorLaw { normal, student_t5, uniform01, lognormal, chisq1 };

enum class Model {
    s_null,                // Y = 1 + X + e
    p1_quadratic,          // Y = 1 + X + theta X^2 + e
    p2_threshold,          // Y = 1 + X 1(X > 0) + (1 + theta) X 1(X <= 0) + e
    p3_smooth_transition,  // Y = 1 + X + [1 - theta F(X)] X + e, F logistic
    local,                 // Y = 1 + sum X_i + n^(-1/2) h^(-p/4) delta(X) + e
};

/// Departure shapes for the local alternative. Both are even and centered
/// under the stationary regressor law, so E[delta(X) X] = 0.
///   quadratic: sum_i (x_i^2 - E[X^2])
///   cosine:    sum_i (cos x_i - E[cos X])
enum class DeltaShape { quadratic, cosine };

/// How the regressor is kept within two stationary standard deviations.
///   clip:   winsorize each output, recursion runs on the unclipped path
///   reject: redraw the innovation until the new value is inside the band
enum class Truncation { clip, reject };

std::string_view to_string(ErrorLaw law);
std::string_view to_string(Model model);
std::string_view to_string(DeltaShape shape);
std::string_view to_string(Truncation truncation);
std::optional<ErrorLaw> parse_error_law(std::string_view name);
std::optional<Model> parse_model(std::string_view name);
std::optional<DeltaShape> parse_delta_shape(std::string_view name);
std::optional<Truncation> parse_truncation(std::string_view name);

struct DGPSpec {
    Model model = Model::s_null;
    double theta = 0.0;
    ErrorLaw error_law = ErrorLaw::normal;
    Index n = 100;
    std::uint64_t seed = 0;
    Truncation truncation = Truncation::clip;
    // Local alternative only.
    DeltaShape shape = DeltaShape::quadratic;
    int p_dim = 1;
    std::optional<double> local_bandwidth;  // default sigma_X n^(-2/9)
};

/// Stationary standard deviation of X_t = 0.5 X_{t-1} + v_t: sqrt(4/3).
double regressor_sd();
/// Truncation band half-width, 2 sqrt(4/3).
double regressor_bound();

constexpr int kBurnIn = 100;

/// AR(1) regressor, coefficient 0.5, N(0,1) innovations, started at 0 with
/// 100 discarded burn-in steps, kept within +/- regressor_bound().
Eigen::VectorXd gen_regressor(Index n, std::uint64_t seed, Truncation truncation = Truncation::clip);

Eigen::VectorXd gen_errors(ErrorLaw law, Index n, std::uint64_t seed);

/// Stream layout under spec.seed: regressor column 0 uses derive_seed(seed, 0),
/// errors derive_seed(seed, 1), extra local-alternative columns derive_seed(seed, 1 + j).
/// Throws std::invalid_argument on an invalid spec.
Sample gen_sample(const DGPSpec& spec);

/// delta(x) for one regressor row.
double delta_value(DeltaShape shape, std::span<const double> row);

/// E[delta(X)^2] under the clipped stationary regressor law with p independent columns.
double delta_second_moment(DeltaShape shape, int p);

/// E[g(X)] for X the stationary N(0, 4/3) law clipped at +/- regressor_bound().
double clipped_regressor_expectation(double (*g)(double));

}  // namespace npspec
