#include "npspec/csv.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "npspec/errors.hpp"
#include "npspec/text.hpp"

namespace npspec::csv {
namespace {

struct Table {
    Eigen::VectorXd lead;  // y or resid
    Eigen::MatrixXd x;
};

std::string where(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

Table read_table(std::istream& in, std::string_view source, std::string_view lead_name) {
    std::string line;
    std::size_t line_no = 0;

    // Header, skipping leading blank lines and a UTF-8 byte order mark.
    std::vector<std::string> names;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (text::trim(line).empty()) continue;
        for (auto cell : text::split(text::trim(line), ',')) names.emplace_back(text::trim(cell));
        break;
    }
    if (names.empty()) throw DataError(std::string(source) + ": empty file, expected a header row");

    std::optional<std::size_t> lead_col;
    std::vector<std::optional<std::size_t>> x_cols;
    for (std::size_t j = 0; j < names.size(); ++j) {
        const std::string& name = names[j];
        if (name == lead_name) {
            if (lead_col) throw DataError(where(source, line_no) + ": column '" + name + "' appears twice");
            lead_col = j;
            continue;
        }
        const auto idx = name.size() > 1 && name[0] == 'x' ? text::parse_integer(std::string_view(name).substr(1))
                                                            : std::nullopt;
        if (!idx || *idx < 1 || *idx > 1000) {
            throw DataError(where(source, line_no) + ": unexpected column '" + name + "'; expected " +
                            std::string(lead_name) + ",x1[,x2,x3]");
        }
        const auto k = static_cast<std::size_t>(*idx - 1);
        if (x_cols.size() <= k) x_cols.resize(k + 1);
        if (x_cols[k]) throw DataError(where(source, line_no) + ": column '" + name + "' appears twice");
        x_cols[k] = j;
    }
    std::string missing;
    if (!lead_col) missing += std::string(lead_name);
    if (x_cols.empty()) missing += std::string(missing.empty() ? "" : ", ") + "x1";
    for (std::size_t k = 0; k < x_cols.size(); ++k) {
        if (!x_cols[k]) missing += (missing.empty() ? "x" : ", x") + std::to_string(k + 1);
    }
    if (!missing.empty()) {
        throw DataError(where(source, line_no) + ": missing column(s) " + missing + "; header has " +
                        std::to_string(names.size()) + " column(s)");
    }
    const std::size_t p = x_cols.size();
    if (p > static_cast<std::size_t>(kMaxRegressors)) {
        throw DataError(where(source, line_no) + ": " + std::to_string(p) +
                        " regressor columns; the tests require p < 4 (at most x1,x2,x3)");
    }

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = text::trim(line);
        if (body.empty()) continue;
        const auto cells = text::split(body, ',');
        if (cells.size() != names.size()) {
            throw DataError(where(source, line_no) + ": expected " + std::to_string(names.size()) +
                            " fields, found " + std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto v = text::parse_double(cells[j]);
            if (!v) {
                throw DataError(where(source, line_no) + ", column '" + names[j] + "': cannot parse '" +
                                std::string(text::trim(cells[j])) + "' as a number");
            }
            if (!std::isfinite(*v)) {
                throw DataError(where(source, line_no) + ", column '" + names[j] + "': non-finite value '" +
                                std::string(text::trim(cells[j])) + "'");
            }
            values.push_back(*v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError(std::string(source) + ": no data rows after the header");

    Table t;
    t.lead.resize(static_cast<Index>(rows));
    t.x.resize(static_cast<Index>(rows), static_cast<Index>(p));
    const std::size_t width = names.size();
    for (std::size_t r = 0; r < rows; ++r) {
        t.lead[static_cast<Index>(r)] = values[r * width + *lead_col];
        for (std::size_t k = 0; k < p; ++k) {
            t.x(static_cast<Index>(r), static_cast<Index>(k)) = values[r * width + *x_cols[k]];
        }
    }
    return t;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

Sample parse_data(std::istream& in, std::string_view source) {
    Table t = read_table(in, source, "y");
    return Sample{std::move(t.lead), std::move(t.x)};
}

Sample parse_data_file(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_data(in, path.string());
}

ResidualData parse_residuals(std::istream& in, std::string_view source) {
    Table t = read_table(in, source, "resid");
    return ResidualData{std::move(t.lead), std::move(t.x)};
}

ResidualData parse_residual_file(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_residuals(in, path.string());
}

void write_sample(std::ostream& out, const Sample& sample) {
    out << "y";
    for (Index j = 0; j < sample.p(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (Index t = 0; t < sample.n(); ++t) {
        out << text::format_double(sample.y[t]);
        for (Index j = 0; j < sample.p(); ++j) out << ',' << text::format_double(sample.x(t, j));
        out << '\n';
    }
}

}  // namespace npspec::csv
