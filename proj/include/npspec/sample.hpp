#pragma once

#include <Eigen/Dense>

namespace npspec {

using Index = Eigen::Index;

constexpr int kMaxRegressors = 3;

/// Paired observations in time order: response y (n) and regressors x (n x p).
struct Sample {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;

    Index n() const { return y.size(); }
    Index p() const { return x.cols(); }
};

/// Throws DataError unless the sample is usable by the tests:
/// matching row counts, 1 <= p <= 3, n >= 2(p + 1), all entries finite.
void validate_sample(const Sample& sample);

/// Same checks for a bare regressor matrix with the given row count.
void validate_regressors(const Eigen::MatrixXd& x);

}  // namespace npspec
