#pragma once

#include <optional>

#include <Eigen/Dense>

#include "npspec/kernels.hpp"
#include "npspec/sample.hpp"
#include "npspec/smoothing.hpp"
#include "npspec/stats.hpp"

namespace npspec {

/// Everything computed once per sample: the null fit, the smoothing
/// coordinates, the resolved bandwidth and the smoother built on them.
struct FittedSample {
    Eigen::MatrixXd coordinates;                 // what the kernel sees (see smoothing_coordinates)
    std::optional<LinearNullModel> null_model;   // absent when residuals were supplied directly
    NullFit null_fit;
    Bandwidth bandwidth;
    KernelSpec kernel;
    NadarayaWatson smoother;
    SmoothFit smooth;

    Index n() const { return null_fit.residuals.size(); }
    int p() const { return static_cast<int>(coordinates.cols()); }

    /// Residuals of the nonparametric fit, resid - m_hat.
    Eigen::VectorXd nonparametric_residuals() const { return null_fit.residuals - smooth.m_hat; }
};

/// Linear null fit by least squares, then smoothing of its residuals.
FittedSample fit_sample(const Sample& sample, const KernelSpec& kernel, const BandwidthSelector& bandwidth);

/// Residual-injection mode: null residuals come from a user-defined model.
/// The null is treated as fixed (no refit) in any later bootstrap.
FittedSample fit_residuals(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const KernelSpec& kernel,
                           const BandwidthSelector& bandwidth);

}  // namespace npspec
