#pragma once

// Reference computations that share no code with the library: kernels are
// re-typed from their textbook formulas and integrals use recursive adaptive
// Simpson instead of the library's Gauss-Kronrod scheme.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

namespace detail {

inline double simpson_step(const Fn& f, double a, double b, double fa, double fm, double fb, double whole,
                           double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
inline double simpson(const Fn& f, double a, double b, double tol = 1e-12, int max_depth = 50) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Simpson over consecutive breakpoints, so kinks never sit inside a panel.
inline double simpson_pieces(const Fn& f, const std::vector<double>& breaks, double tol = 1e-12) {
    double total = 0.0;
    const double share = tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) total += simpson(f, breaks[i], breaks[i + 1], share);
    return total;
}

inline double kernel(const std::string& name, double u) {
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    if (name == "uniform") return 0.5;
    if (name == "epanechnikov") return 0.75 * w;
    if (name == "biweight") return 15.0 / 16.0 * w * w;
    if (name == "triweight") return 35.0 / 32.0 * w * w * w;
    throw std::invalid_argument("oracle kernel: " + name);
}

/// (K*K)(u) by Simpson over the overlap of the two supports.
inline double convolution(const std::string& name, double u, double tol = 1e-13) {
    const double lo = std::max(-1.0, -1.0 - u);
    const double hi = std::min(1.0, 1.0 - u);
    if (hi <= lo) return 0.0;
    return simpson([&](double v) { return kernel(name, u + v) * kernel(name, v); }, lo, hi, tol);
}

struct Constants {
    double a, b, c, d, t;
};

/// One-dimensional functionals straight from their integral definitions.
inline Constants constants(const std::string& name, double tol = 1e-12) {
    const std::vector<double> k_breaks{-1.0, 0.0, 1.0};
    const std::vector<double> kk_breaks{-2.0, -1.0, 0.0, 1.0, 2.0};
    Constants out{};
    out.a = simpson_pieces([&](double u) { return kernel(name, u) * kernel(name, u); }, k_breaks, tol);
    out.t = simpson_pieces([&](double u) { return kernel(name, u) * convolution(name, u); }, k_breaks, tol);
    out.b = simpson_pieces(
        [&](double u) {
            const double kk = convolution(name, u);
            return kk * kk;
        },
        kk_breaks, tol);
    out.d = simpson_pieces(
        [&](double u) {
            const double r = kernel(name, u) - 0.5 * convolution(name, u);
            return r * r;
        },
        kk_breaks, tol);
    out.c = kernel(name, 0.0) - 0.5 * out.a;
    return out;
}

/// Direct O(n^2) Nadaraya-Watson with the oracle kernel, one column.
inline std::vector<double> nadaraya_watson(const std::string& name, const std::vector<double>& x,
                                           const std::vector<double>& e, double h) {
    std::vector<double> out(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t s = 0; s < x.size(); ++s) {
            const double w = kernel(name, (x[t] - x[s]) / h) / h;
            num += w * e[s];
            den += w;
        }
        out[t] = num / den;
    }
    return out;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracle
