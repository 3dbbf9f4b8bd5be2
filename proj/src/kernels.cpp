#include "npspec/kernels.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "npspec/errors.hpp"
#include "npspec/quadrature.hpp"

namespace npspec {
namespace {

constexpr std::array<double, 3> kKernelBreaks = {-1.0, 0.0, 1.0};
constexpr std::array<double, 5> kConvolutionBreaks = {-2.0, -1.0, 0.0, 1.0, 2.0};

// Inner integrals are polynomial on a single interval, so one Gauss-Kronrod
// panel is already exact; the tolerance only guards against roundoff.
constexpr double kInnerTol = 1e-14;

double integrate_or_throw(const quadrature::Integrand& f, std::span<const double> breaks, double tol,
                          const char* functional) {
    const auto r = quadrature::integrate(f, breaks, tol);
    if (!r.converged) {
        throw QuadratureError(std::string("quadrature for kernel functional '") + functional +
                              "' did not converge (estimated error " + std::to_string(r.error) + ")");
    }
    return r.value;
}

KernelConstants compute_univariate(const KernelSpec& kernel, double tol) {
    auto k = [&](double u) { return eval_kernel(kernel, u); };
    auto conv = [&](double u) { return self_convolution(kernel, u); };

    KernelConstants out;
    out.p = 1;
    out.tol = tol;
    out.a = integrate_or_throw([&](double u) { return k(u) * k(u); }, kKernelBreaks, tol, "a");
    out.t = integrate_or_throw([&](double u) { return k(u) * conv(u); }, kKernelBreaks, tol, "t");
    out.b = integrate_or_throw(
        [&](double u) {
            const double s = conv(u);
            return s * s;
        },
        kConvolutionBreaks, tol, "b");
    out.d = integrate_or_throw(
        [&](double u) {
            const double diff = k(u) - 0.5 * conv(u);
            return diff * diff;
        },
        kConvolutionBreaks, tol, "d");
    out.c = k(0.0) - 0.5 * out.a;

    if (kernel.family == KernelFamily::uniform) {
        const double slack = 10.0 * tol;
        const bool agrees = std::abs(out.a - 0.5) <= slack && std::abs(out.b - 1.0 / 3.0) <= slack &&
                            std::abs(out.t - 0.375) <= slack && std::abs(out.c - 0.25) <= slack &&
                            std::abs(out.d - 5.0 / 24.0) <= slack;
        if (!agrees) throw std::logic_error("uniform kernel functionals disagree with closed forms");
    }
    return out;
}

KernelConstants lift(const KernelConstants& one, double k0, int p) {
    if (p == 1) return one;
    KernelConstants out = one;
    out.p = p;
    out.a = std::pow(one.a, p);
    out.b = std::pow(one.b, p);
    out.t = std::pow(one.t, p);
    out.c = std::pow(k0, p) - 0.5 * out.a;
    out.d = out.a - out.t + 0.25 * out.b;
    return out;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::uniform: return "uniform";
        case KernelFamily::epanechnikov: return "epanechnikov";
        case KernelFamily::biweight: return "biweight";
        case KernelFamily::triweight: return "triweight";
    }
    return "unknown";
}

std::optional<KernelFamily> parse_kernel_family(std::string_view name) {
    for (auto f : {KernelFamily::uniform, KernelFamily::epanechnikov, KernelFamily::biweight,
                   KernelFamily::triweight}) {
        if (name == to_string(f)) return f;
    }
    return std::nullopt;
}

double eval_kernel(const KernelSpec& kernel, double u) {
    if (!(std::abs(u) <= 1.0)) return 0.0;
    const double w = 1.0 - u * u;
    switch (kernel.family) {
        case KernelFamily::uniform: return 0.5;
        case KernelFamily::epanechnikov: return 0.75 * w;
        case KernelFamily::biweight: return 0.9375 * w * w;
        case KernelFamily::triweight: return 1.09375 * w * w * w;
    }
    return 0.0;
}

double eval_product_kernel(const KernelSpec& kernel, std::span<const double> u) {
    if (u.empty()) throw std::invalid_argument("product kernel needs dimension >= 1");
    double out = 1.0;
    for (double ui : u) {
        out *= eval_kernel(kernel, ui);
        if (out == 0.0) break;
    }
    return out;
}

double self_convolution(const KernelSpec& kernel, double u) {
    const double w = std::abs(u);
    if (!(w < 2.0)) return 0.0;
    switch (kernel.family) {
        case KernelFamily::uniform: return 0.25 * (2.0 - w);
        case KernelFamily::epanechnikov: {
            const double r = 2.0 - w;
            return 3.0 / 160.0 * r * r * r * (w * w + 6.0 * w + 4.0);
        }
        case KernelFamily::biweight:
        case KernelFamily::triweight: break;
    }
    // Overlap of [-1, 1] and [-1 - w, 1 - w].
    const auto r = quadrature::integrate(
        [&](double v) { return eval_kernel(kernel, w + v) * eval_kernel(kernel, v); }, -1.0, 1.0 - w,
        kInnerTol);
    if (!r.converged) throw QuadratureError("quadrature for the kernel self-convolution did not converge");
    return r.value;
}

KernelConstants kernel_constants(const KernelSpec& kernel, int p, double tol) {
    if (p < 1) throw std::invalid_argument("kernel dimension must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");

    using Key = std::tuple<int, int, double>;
    static std::mutex mutex;
    static std::map<Key, KernelConstants> cache;

    const Key key{static_cast<int>(kernel.family), p, tol};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // Computed outside the lock; concurrent misses produce identical values.
    const KernelConstants value = lift(compute_univariate(kernel, tol), eval_kernel(kernel, 0.0), p);
    std::lock_guard lock(mutex);
    cache.emplace(key, value);
    return value;
}

double efficiency_numerator(const KernelSpec& kernel, double tol) {
    return integrate_or_throw(
        [&](double u) {
            const double diff = 2.0 * eval_kernel(kernel, u) - self_convolution(kernel, u);
            return diff * diff;
        },
        kConvolutionBreaks, tol, "int (2K - K*K)^2");
}

double kernel_mass(const KernelSpec& kernel, double tol) {
    return integrate_or_throw([&](double u) { return eval_kernel(kernel, u); }, kKernelBreaks, tol,
                              "int K");
}

}  // namespace npspec
