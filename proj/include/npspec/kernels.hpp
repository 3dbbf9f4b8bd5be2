#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace npspec {

enum class KernelFamily { uniform, epanechnikov, biweight, triweight };

/// One of the four compactly supported polynomial kernels on [-1, 1].
///
/// All built-ins are symmetric probability densities bounded by 1 with
/// K(0) > 0. Custom kernels are deliberately not representable.
struct KernelSpec {
    KernelFamily family = KernelFamily::uniform;

    static constexpr double support_halfwidth = 1.0;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string_view to_string(KernelFamily family);
std::optional<KernelFamily> parse_kernel_family(std::string_view name);

/// K(u); zero outside [-1, 1].
double eval_kernel(const KernelSpec& kernel, double u);

/// Product kernel prod_i K(u_i). Throws std::invalid_argument on an empty vector.
double eval_product_kernel(const KernelSpec& kernel, std::span<const double> u);

/// (K*K)(u) = integral of K(u + v) K(v) dv, supported on [-2, 2].
/// Closed form for uniform and Epanechnikov, adaptive quadrature otherwise.
double self_convolution(const KernelSpec& kernel, double u);

/// Kernel functionals driving the centering, scaling and efficiency formulas,
/// lifted to the p-dimensional product kernel.
///
///   a = int K^2
///   b = int (K*K)^2
///   c = K(0) - a/2
///   d = int (K - (K*K)/2)^2 = a - t + b/4
///   t = int K (K*K)
struct KernelConstants {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double t = 0.0;
    int p = 1;
    double tol = 0.0;

    /// 4d/b, the base of the relative-efficiency formula.
    double efficiency_ratio() const { return 4.0 * d / b; }

    friend bool operator==(const KernelConstants&, const KernelConstants&) = default;
};

constexpr double kDefaultQuadratureTol = 1e-10;

/// Computes the one-dimensional functionals by adaptive quadrature (absolute
/// error <= tol each) and lifts them to dimension p:
///   a_p = a^p, b_p = b^p, t_p = t^p, c_p = K(0)^p - a^p/2, d_p = a^p - t^p + b^p/4.
///
/// Results are memoized per (family, p, tol); the function is thread-safe.
/// Throws QuadratureError naming the functional if refinement does not converge,
/// and std::logic_error if the uniform kernel disagrees with its closed form.
KernelConstants kernel_constants(const KernelSpec& kernel, int p = 1,
                                 double tol = kDefaultQuadratureTol);

/// int (2K - K*K)^2 in one dimension by direct quadrature; equals 4d.
double efficiency_numerator(const KernelSpec& kernel, double tol = kDefaultQuadratureTol);

/// int K over the support by quadrature; 1 for every built-in.
double kernel_mass(const KernelSpec& kernel, double tol = kDefaultQuadratureTol);

}  // namespace npspec
