#include "npspec/smoothing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "npspec/errors.hpp"
#include "npspec/text.hpp"

namespace npspec {
namespace {

double pair_weight(const Eigen::MatrixXd& x, Index t, Index s, const KernelSpec& kernel, double h) {
    double w = 1.0;
    for (Index j = 0; j < x.cols() && w != 0.0; ++j) {
        w *= eval_kernel(kernel, (x(t, j) - x(s, j)) / h);
    }
    return w;
}

void check_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("bandwidth must be positive and finite, got " + text::format_double(h));
    }
}

}  // namespace

std::string_view to_string(BandwidthRule rule) {
    switch (rule) {
        case BandwidthRule::fixed: return "fixed";
        case BandwidthRule::rot: return "rot";
        case BandwidthRule::cv: return "cv";
    }
    return "unknown";
}

std::string to_string(const BandwidthSelector& selector) {
    switch (selector.rule) {
        case BandwidthRule::fixed: return "fixed:" + text::format_double(selector.value);
        case BandwidthRule::rot: return "rot:" + text::format_double(selector.value);
        case BandwidthRule::cv:
            return "cv:" + text::format_double(selector.cv.c1) + "," + text::format_double(selector.cv.c2) +
                   "," + std::to_string(selector.cv.grid_size);
    }
    return "unknown";
}

NadarayaWatson::NadarayaWatson(const Eigen::MatrixXd& x, const KernelSpec& kernel, double h) : h_(h) {
    check_bandwidth(h);
    if (x.cols() < 1) throw std::invalid_argument("regressor matrix needs at least one column");
    const Index n = x.rows();
    weights_.resize(n, n);
    for (Index t = 0; t < n; ++t) {
        weights_(t, t) = pair_weight(x, t, t, kernel, h);
        for (Index s = t + 1; s < n; ++s) {
            const double w = pair_weight(x, t, s, kernel, h);
            weights_(t, s) = w;
            weights_(s, t) = w;
        }
    }
    denominators_.resize(n);
    for (Index t = 0; t < n; ++t) {
        double den = 0.0;
        for (Index s = 0; s < n; ++s) den += weights_(s, t);
        denominators_[t] = den;
    }
}

Eigen::VectorXd NadarayaWatson::smooth(const Eigen::VectorXd& values) const {
    const Index n = size();
    if (values.size() != n) {
        throw std::invalid_argument("smoother expects " + std::to_string(n) + " values, got " +
                                    std::to_string(values.size()));
    }
    Eigen::VectorXd out(n);
    for (Index t = 0; t < n; ++t) {
        const double* column = weights_.col(t).data();
        double num = 0.0;
        for (Index s = 0; s < n; ++s) num += values[s] * column[s];
        out[t] = num / denominators_[t];
    }
    return out;
}

SmoothFit NadarayaWatson::fit(const Eigen::VectorXd& residuals) const {
    SmoothFit out;
    out.m_hat = smooth(residuals);
    double ssr = 0.0;
    for (Index t = 0; t < residuals.size(); ++t) {
        const double e = residuals[t] - out.m_hat[t];
        ssr += e * e;
    }
    out.ssr1 = ssr;
    out.sigma2_hat = ssr / static_cast<double>(residuals.size());
    return out;
}

SmoothFit nw_fit(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const KernelSpec& kernel,
                 double h) {
    if (residuals.size() != x.rows()) {
        throw std::invalid_argument("residuals and regressors differ in length");
    }
    return NadarayaWatson(x, kernel, h).fit(residuals);
}

double sample_sd(const Eigen::VectorXd& v) {
    const Index n = v.size();
    if (n < 2) return 0.0;
    const double mean = v.mean();
    double ss = 0.0;
    for (Index i = 0; i < n; ++i) ss += (v[i] - mean) * (v[i] - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

Bandwidth rot_bandwidth(const Eigen::MatrixXd& x, double omega) {
    const Index p = x.cols();
    if (p < 1) throw std::invalid_argument("regressor matrix needs at least one column");
    const double upper = 1.0 / (2.0 * static_cast<double>(p));
    if (!(omega > 0.0 && omega < upper)) {
        throw std::invalid_argument("rule-of-thumb rate exponent must lie in (0, 1/(2p)) = (0, " +
                                    text::format_double(upper) + "), got " + text::format_double(omega));
    }
    double log_scale = 0.0;
    for (Index j = 0; j < p; ++j) {
        const double sd = sample_sd(x.col(j));
        if (!(sd > 0.0)) {
            throw DegenerateError("regressor column " + std::to_string(j + 1) + " has zero variance");
        }
        log_scale += std::log(sd);
    }
    const double scale = p == 1 ? sample_sd(x.col(0)) : std::exp(log_scale / static_cast<double>(p));
    const double n = static_cast<double>(x.rows());
    return Bandwidth{scale * std::pow(n, -omega), BandwidthRule::rot, omega};
}

std::optional<double> cv_criterion(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x,
                                   const KernelSpec& kernel, double h) {
    check_bandwidth(h);
    const Index n = x.rows();
    double criterion = 0.0;
    bool any_neighbour = false;
    for (Index t = 0; t < n; ++t) {
        double num = 0.0;
        double den = 0.0;
        for (Index s = 0; s < n; ++s) {
            if (s == t) continue;
            const double w = pair_weight(x, t, s, kernel, h);
            num += w * residuals[s];
            den += w;
        }
        double prediction = 0.0;
        if (den > 0.0) {
            prediction = num / den;
            any_neighbour = true;
        }
        const double e = residuals[t] - prediction;
        criterion += e * e;
    }
    if (!any_neighbour) return std::nullopt;
    return criterion;
}

Bandwidth cv_bandwidth(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const KernelSpec& kernel,
                       const CvSettings& settings) {
    if (!(settings.c1 > 0.0 && settings.c1 < settings.c2)) {
        throw std::invalid_argument("cross-validation needs 0 < c1 < c2");
    }
    if (settings.grid_size < 2) throw std::invalid_argument("cross-validation grid needs at least 2 points");
    if (residuals.size() != x.rows()) throw std::invalid_argument("residuals and regressors differ in length");

    const double n = static_cast<double>(x.rows());
    const double rate = std::pow(n, -1.0 / (static_cast<double>(x.cols()) + 4.0));
    const double lo = settings.c1 * rate;
    const double hi = settings.c2 * rate;

    std::optional<double> best_h;
    double best = 0.0;
    for (int k = 0; k < settings.grid_size; ++k) {
        const double h = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(settings.grid_size - 1);
        const auto value = cv_criterion(residuals, x, kernel, h);
        if (!value) continue;
        if (!best_h || *value < best) {
            best = *value;
            best_h = h;
        }
    }
    if (!best_h) {
        throw DegenerateError("every cross-validation bandwidth leaves all points without neighbours");
    }
    return Bandwidth{*best_h, BandwidthRule::cv, std::nullopt};
}

Bandwidth resolve_bandwidth(const BandwidthSelector& selector, const Eigen::VectorXd& residuals,
                            const Eigen::MatrixXd& x, const KernelSpec& kernel) {
    switch (selector.rule) {
        case BandwidthRule::fixed:
            check_bandwidth(selector.value);
            return Bandwidth{selector.value, BandwidthRule::fixed, std::nullopt};
        case BandwidthRule::rot: return rot_bandwidth(x, selector.value);
        case BandwidthRule::cv: return cv_bandwidth(residuals, x, kernel, selector.cv);
    }
    throw std::invalid_argument("unknown bandwidth rule");
}

Eigen::MatrixXd smoothing_coordinates(const Eigen::MatrixXd& x) {
    if (x.cols() <= 1) return x;
    Eigen::MatrixXd out = x;
    for (Index j = 0; j < x.cols(); ++j) {
        const double sd = sample_sd(x.col(j));
        if (!(sd > 0.0)) {
            throw DegenerateError("regressor column " + std::to_string(j + 1) + " has zero variance");
        }
        out.col(j) /= sd;
    }
    return out;
}

}  // namespace npspec
