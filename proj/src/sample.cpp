#include "npspec/sample.hpp"

#include <string>

#include "npspec/errors.hpp"

namespace npspec {

void validate_regressors(const Eigen::MatrixXd& x) {
    const Index p = x.cols();
    if (p < 1 || p > kMaxRegressors) {
        throw DataError("number of regressors must be between 1 and 3 (p < 4), got " + std::to_string(p));
    }
    if (x.rows() < 2 * (p + 1)) {
        throw DataError("need at least " + std::to_string(2 * (p + 1)) + " observations for p = " +
                        std::to_string(p) + ", got " + std::to_string(x.rows()));
    }
    if (!x.allFinite()) throw DataError("regressors contain non-finite values");
}

void validate_sample(const Sample& sample) {
    if (sample.x.rows() != sample.y.size()) {
        throw DataError("response has " + std::to_string(sample.y.size()) + " rows but regressors have " +
                        std::to_string(sample.x.rows()));
    }
    validate_regressors(sample.x);
    if (!sample.y.allFinite()) throw DataError("response contains non-finite values");
}

}  // namespace npspec
