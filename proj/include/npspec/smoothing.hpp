#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "npspec/kernels.hpp"
#include "npspec/sample.hpp"

namespace npspec {

enum class BandwidthRule { fixed, rot, cv };

/// Cross-validation search range c1*n^(-1/(p+4)) .. c2*n^(-1/(p+4)) on an
/// evenly spaced grid. The defaults are implementation choices.
struct CvSettings {
    double c1 = 0.5;
    double c2 = 2.0;
    int grid_size = 20;

    friend bool operator==(const CvSettings&, const CvSettings&) = default;
};

/// A resolved bandwidth together with the rule that produced it.
struct Bandwidth {
    double h = 0.0;
    BandwidthRule rule = BandwidthRule::fixed;
    std::optional<double> omega;  // rate exponent, rot only
};

/// Unresolved bandwidth rule as written on the command line:
/// `fixed:<h>`, `rot:<omega>` (fractions allowed, e.g. `rot:2/9`), `cv:<c1>,<c2>,<grid>`.
struct BandwidthSelector {
    BandwidthRule rule = BandwidthRule::rot;
    double value = 2.0 / 9.0;  // h for fixed, omega for rot; unused for cv
    CvSettings cv;

    friend bool operator==(const BandwidthSelector&, const BandwidthSelector&) = default;
};

std::string to_string(const BandwidthSelector& selector);
std::string_view to_string(BandwidthRule rule);

struct SmoothFit {
    Eigen::VectorXd m_hat;  // smoothed residual mean at each sample point
    double ssr1 = 0.0;      // sum (resid - m_hat)^2
    double sigma2_hat = 0.0;
};

/// Nadaraya-Watson smoother evaluated at the sample points.
///
/// The kernel matrix depends only on (x, kernel, h), so it is built once and
/// reused for every residual vector smoothed on the same design, which is the
/// common case inside the bootstrap. The own observation is always included,
/// so every denominator is at least K(0)^p > 0. Summation order is fixed.
class NadarayaWatson {
public:
    NadarayaWatson(const Eigen::MatrixXd& x, const KernelSpec& kernel, double h);

    Eigen::VectorXd smooth(const Eigen::VectorXd& values) const;
    SmoothFit fit(const Eigen::VectorXd& residuals) const;

    Index size() const { return denominators_.size(); }
    double bandwidth() const { return h_; }

private:
    double h_;
    Eigen::MatrixXd weights_;  // prod_i K((x_ti - x_si)/h), symmetric
    Eigen::VectorXd denominators_;
};

SmoothFit nw_fit(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const KernelSpec& kernel,
                 double h);

/// Sample standard deviation (n - 1 denominator).
double sample_sd(const Eigen::VectorXd& v);

/// h = S_X n^(-omega); for p > 1 the per-column S_X are combined by their
/// geometric mean. Requires omega in (0, 1/(2p)).
Bandwidth rot_bandwidth(const Eigen::MatrixXd& x, double omega);

/// Leave-one-out criterion sum_t (resid_t - m_{h,-t}(x_t))^2. Points with an
/// empty leave-one-out neighbourhood predict 0. Returns nullopt when every
/// point is empty.
std::optional<double> cv_criterion(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x,
                                   const KernelSpec& kernel, double h);

/// Grid point minimising the leave-one-out criterion (first one on ties).
Bandwidth cv_bandwidth(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const KernelSpec& kernel,
                       const CvSettings& settings = {});

Bandwidth resolve_bandwidth(const BandwidthSelector& selector, const Eigen::VectorXd& residuals,
                            const Eigen::MatrixXd& x, const KernelSpec& kernel);

/// Coordinates the tests smooth on: the raw column when p = 1, otherwise each
/// column divided by its sample standard deviation so one scalar h fits all.
Eigen::MatrixXd smoothing_coordinates(const Eigen::MatrixXd& x);

}  // namespace npspec
