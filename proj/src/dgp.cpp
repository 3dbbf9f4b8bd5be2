#include "npspec/dgp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include "npspec/quadrature.hpp"
#include "npspec/rng.hpp"

namespace npspec {
namespace {

constexpr double kArCoefficient = 0.5;

template <class Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view name, const std::array<Enum, N>& values) {
    for (Enum v : values) {
        if (name == to_string(v)) return v;
    }
    return std::nullopt;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double square(double x) { return x * x; }
double fourth(double x) { return x * x * x * x; }
double cosine(double x) { return std::cos(x); }
double cosine_squared(double x) { return std::cos(x) * std::cos(x); }

struct ShapeMoments {
    double mean;    // E[g(X)]
    double second;  // E[g(X)^2]
};

ShapeMoments shape_moments(DeltaShape shape) {
    static const ShapeMoments quadratic{clipped_regressor_expectation(square),
                                        clipped_regressor_expectation(fourth)};
    static const ShapeMoments cos_moments{clipped_regressor_expectation(cosine),
                                          clipped_regressor_expectation(cosine_squared)};
    return shape == DeltaShape::quadratic ? quadratic : cos_moments;
}

}  // namespace

std::string_view to_string(ErrorLaw law) {
    switch (law) {
        case ErrorLaw::normal: return "normal";
        case ErrorLaw::student_t5: return "t5";
        case ErrorLaw::uniform01: return "uniform";
        case ErrorLaw::lognormal: return "lognormal";
        case ErrorLaw::chisq1: return "chisq1";
    }
    return "unknown";
}

std::string_view to_string(Model model) {
    switch (model) {
        case Model::s_null: return "s_null";
        case Model::p1_quadratic: return "p1";
        case Model::p2_threshold: return "p2";
        case Model::p3_smooth_transition: return "p3";
        case Model::local: return "local";
    }
    return "unknown";
}

std::string_view to_string(DeltaShape shape) { return shape == DeltaShape::quadratic ? "quadratic" : "cosine"; }

std::string_view to_string(Truncation truncation) { return truncation == Truncation::clip ? "clip" : "reject"; }

std::optional<ErrorLaw> parse_error_law(std::string_view name) {
    return parse_enum(name, std::array{ErrorLaw::normal, ErrorLaw::student_t5, ErrorLaw::uniform01,
                                       ErrorLaw::lognormal, ErrorLaw::chisq1});
}

std::optional<Model> parse_model(std::string_view name) {
    return parse_enum(name, std::array{Model::s_null, Model::p1_quadratic, Model::p2_threshold,
                                       Model::p3_smooth_transition, Model::local});
}

std::optional<DeltaShape> parse_delta_shape(std::string_view name) {
    return parse_enum(name, std::array{DeltaShape::quadratic, DeltaShape::cosine});
}

std::optional<Truncation> parse_truncation(std::string_view name) {
    return parse_enum(name, std::array{Truncation::clip, Truncation::reject});
}

double regressor_sd() { return std::sqrt(1.0 / (1.0 - kArCoefficient * kArCoefficient)); }

double regressor_bound() { return 2.0 * regressor_sd(); }

Eigen::VectorXd gen_regressor(Index n, std::uint64_t seed, Truncation truncation) {
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    rng::Xoshiro256 gen(seed);
    boost::random::normal_distribution<double> innovation(0.0, 1.0);
    const double bound = regressor_bound();
    Eigen::VectorXd out(n);
    double state = 0.0;
    for (Index step = 0; step < kBurnIn + n; ++step) {
        double value = kArCoefficient * state + innovation(gen);
        if (truncation == Truncation::reject) {
            while (std::abs(value) > bound) value = kArCoefficient * state + innovation(gen);
            state = value;
        } else {
            state = value;
            value = std::clamp(value, -bound, bound);
        }
        if (step >= kBurnIn) out[step - kBurnIn] = value;
    }
    return out;
}

Eigen::VectorXd gen_errors(ErrorLaw law, Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    rng::Xoshiro256 gen(seed);
    Eigen::VectorXd out(n);
    switch (law) {
        case ErrorLaw::normal: {
            boost::random::normal_distribution<double> dist(0.0, 1.0);
            for (Index t = 0; t < n; ++t) out[t] = dist(gen);
            break;
        }
        case ErrorLaw::student_t5: {
            boost::random::student_t_distribution<double> dist(5.0);
            for (Index t = 0; t < n; ++t) out[t] = dist(gen);
            break;
        }
        case ErrorLaw::uniform01: {
            const double scale = std::sqrt(12.0);
            for (Index t = 0; t < n; ++t) out[t] = (gen.uniform01() - 0.5) * scale;
            break;
        }
        case ErrorLaw::lognormal: {
            boost::random::normal_distribution<double> dist(0.0, 1.0);
            const double e = std::numbers::e;
            const double mean = std::sqrt(e);
            const double sd = std::sqrt((e - 1.0) * e);
            for (Index t = 0; t < n; ++t) out[t] = (std::exp(dist(gen)) - mean) / sd;
            break;
        }
        case ErrorLaw::chisq1: {
            boost::random::chi_squared_distribution<double> dist(1.0);
            const double sd = std::sqrt(2.0);
            for (Index t = 0; t < n; ++t) out[t] = (dist(gen) - 1.0) / sd;
            break;
        }
    }
    return out;
}

double clipped_regressor_expectation(double (*g)(double)) {
    const double sigma = regressor_sd();
    const double c = regressor_bound();
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const auto interior = quadrature::integrate(
        [&](double x) { return g(x) * norm * std::exp(-0.5 * (x / sigma) * (x / sigma)); }, -c, c, 1e-13);
    const double tail = 0.5 * std::erfc(2.0 / std::sqrt(2.0));  // P(Z > 2)
    return interior.value + tail * (g(c) + g(-c));
}

double delta_value(DeltaShape shape, std::span<const double> row) {
    const double centre = shape_moments(shape).mean;
    double out = 0.0;
    for (double x : row) out += (shape == DeltaShape::quadratic ? x * x : std::cos(x)) - centre;
    return out;
}

double delta_second_moment(DeltaShape shape, int p) {
    if (p < 1) throw std::invalid_argument("dimension must be >= 1");
    const ShapeMoments m = shape_moments(shape);
    return static_cast<double>(p) * (m.second - m.mean * m.mean);
}

Sample gen_sample(const DGPSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("sample size must be >= 1");
    if (!std::isfinite(spec.theta)) throw std::invalid_argument("theta must be finite");
    const int p = spec.model == Model::local ? spec.p_dim : 1;
    if (p < 1 || p > kMaxRegressors) throw std::invalid_argument("local alternative dimension must be 1, 2 or 3");

    Sample s;
    s.x.resize(spec.n, p);
    s.x.col(0) = gen_regressor(spec.n, rng::derive_seed(spec.seed, 0), spec.truncation);
    for (int j = 1; j < p; ++j) {
        s.x.col(j) = gen_regressor(spec.n, rng::derive_seed(spec.seed, 1 + static_cast<std::uint64_t>(j)),
                                   spec.truncation);
    }
    const Eigen::VectorXd e = gen_errors(spec.error_law, spec.n, rng::derive_seed(spec.seed, 1));

    s.y.resize(spec.n);
    const double theta = spec.theta;
    double departure_scale = 0.0;
    if (spec.model == Model::local) {
        const double n = static_cast<double>(spec.n);
        const double h = spec.local_bandwidth.value_or(regressor_sd() * std::pow(n, -2.0 / 9.0));
        if (!(h > 0.0)) throw std::invalid_argument("local alternative bandwidth must be positive");
        departure_scale = std::pow(n, -0.5) * std::pow(h, -static_cast<double>(p) / 4.0);
    }
    std::array<double, kMaxRegressors> row{};
    for (Index t = 0; t < spec.n; ++t) {
        const double x = s.x(t, 0);
        double mean = 0.0;
        switch (spec.model) {
            case Model::s_null: mean = 1.0 + x; break;
            case Model::p1_quadratic: mean = 1.0 + x + theta * x * x; break;
            case Model::p2_threshold: mean = 1.0 + (x > 0.0 ? x : (1.0 + theta) * x); break;
            case Model::p3_smooth_transition: mean = 1.0 + x + (1.0 - theta * logistic(x)) * x; break;
            case Model::local: {
                mean = 1.0;
                for (int j = 0; j < p; ++j) {
                    row[j] = s.x(t, j);
                    mean += row[j];
                }
                mean += departure_scale * delta_value(spec.shape, std::span(row.data(), p));
                break;
            }
        }
        s.y[t] = mean + e[t];
    }
    return s;
}

}  // namespace npspec
