#include "npspec/fitting.hpp"

#include "npspec/errors.hpp"

namespace npspec {
namespace {

constexpr double kExactFitTolerance = 1e-24;

FittedSample assemble(Eigen::MatrixXd coordinates, std::optional<LinearNullModel> model, NullFit null_fit,
                      const KernelSpec& kernel, const BandwidthSelector& selector) {
    const Bandwidth bw = resolve_bandwidth(selector, null_fit.residuals, coordinates, kernel);
    NadarayaWatson smoother(coordinates, kernel, bw.h);
    SmoothFit smooth = smoother.fit(null_fit.residuals);
    return FittedSample{std::move(coordinates), std::move(model), std::move(null_fit), bw, kernel,
                        std::move(smoother), std::move(smooth)};
}

}  // namespace

FittedSample fit_sample(const Sample& sample, const KernelSpec& kernel, const BandwidthSelector& bandwidth) {
    validate_sample(sample);
    LinearNullModel model(sample.x);
    NullFit null_fit = model.fit(sample.y);
    // An exact linear relation leaves only round-off in the residuals.
    const double scale = sum_of_squares(sample.y);
    if (null_fit.ssr0 <= kExactFitTolerance * scale) {
        throw DegenerateError("the linear null model fits the sample exactly (SSR0 is zero to working precision)");
    }
    return assemble(smoothing_coordinates(sample.x), std::move(model), std::move(null_fit), kernel, bandwidth);
}

FittedSample fit_residuals(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& x, const KernelSpec& kernel,
                           const BandwidthSelector& bandwidth) {
    validate_regressors(x);
    if (residuals.size() != x.rows()) throw DataError("residual and regressor columns differ in length");
    if (!residuals.allFinite()) throw DataError("residuals contain non-finite values");
    NullFit null_fit;
    null_fit.residuals = residuals;
    null_fit.fitted = Eigen::VectorXd::Zero(residuals.size());
    null_fit.ssr0 = sum_of_squares(residuals);
    return assemble(smoothing_coordinates(x), std::nullopt, std::move(null_fit), kernel, bandwidth);
}

}  // namespace npspec
