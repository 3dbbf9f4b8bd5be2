#include "npspec/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace npspec::quadrature {
namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Segment& lhs, const Segment& rhs) const { return lhs.error < rhs.error; }
};

Segment gauss_kronrod_15(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    double kronrod = f_center * kWgk[7];
    double gauss = f_center * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    return Segment{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

Result integrate(const Integrand& f, std::span<const double> breakpoints, double abs_tol,
                 int max_intervals) {
    if (breakpoints.size() < 2) throw std::invalid_argument("quadrature needs at least two breakpoints");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");

    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] <= breakpoints[i + 1])) {
            throw std::invalid_argument("quadrature breakpoints must be sorted");
        }
        if (breakpoints[i] == breakpoints[i + 1]) continue;
        Segment s = gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
        total_error += s.error;
        heap.push(s);
    }

    while (total_error > abs_tol && static_cast<int>(heap.size()) < max_intervals) {
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval collapsed to adjacent doubles; nothing left to refine.
            heap.push(worst);
            break;
        }
        Segment left = gauss_kronrod_15(f, worst.a, mid);
        Segment right = gauss_kronrod_15(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from scratch in partition order so the value does not depend on
    // the floating-point history of incremental updates.
    std::vector<Segment> parts;
    parts.reserve(heap.size());
    while (!heap.empty()) {
        parts.push_back(heap.top());
        heap.pop();
    }
    std::sort(parts.begin(), parts.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
    Result out;
    for (const Segment& s : parts) {
        out.value += s.value;
        out.error += s.error;
    }
    out.intervals = static_cast<int>(parts.size());
    out.converged = out.error <= abs_tol;
    return out;
}

Result integrate(const Integrand& f, double a, double b, double abs_tol, int max_intervals) {
    const std::array<double, 2> limits{a, b};
    return integrate(f, limits, abs_tol, max_intervals);
}

}  // namespace npspec::quadrature
