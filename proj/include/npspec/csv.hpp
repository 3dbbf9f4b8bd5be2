#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <Eigen/Dense>

#include "npspec/sample.hpp"

// Data files: a header row naming the columns, then one observation per row in
// time order. Decimal numbers, comma separated, LF or CRLF line ends.
//   sample file:   y,x1[,x2,x3]
//   residual file: resid,x1[,x2,x3]
// Columns may come in any order; x columns must be x1..xp without gaps.
// All errors are DataError naming the line and column.

namespace npspec::csv {

/// Parses and shape-checks a sample. Row order is preserved. The minimum-size
/// rule of validate_sample is left to the consumer so short files still load.
Sample parse_data(std::istream& in, std::string_view source = "<input>");
Sample parse_data_file(const std::filesystem::path& path);

struct ResidualData {
    Eigen::VectorXd resid;
    Eigen::MatrixXd x;
};

ResidualData parse_residuals(std::istream& in, std::string_view source = "<input>");
ResidualData parse_residual_file(const std::filesystem::path& path);

/// Header plus rows, shortest round-trip decimal for every value.
void write_sample(std::ostream& out, const Sample& sample);

}  // namespace npspec::csv
