#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npspec/kernels.hpp"

namespace npspec {

/// Exponent applied to the kernel ratio 4d/b.
///   eq52:   1/(2 - p omega), the closed form
///   table1: 2/(2 - p omega), the scale the reference table follows
enum class AreConvention { eq52, table1 };

std::string_view to_string(AreConvention convention);
std::optional<AreConvention> parse_are_convention(std::string_view name);

/// Pitman relative efficiency of the loss test over the GLR test. Independent
/// of the loss function.
struct AREResult {
    double ratio = 0.0;  // int (2K - K*K)^2 / int (K*K)^2 = 4 d_p / b_p
    double exponent = 0.0;
    double are = 0.0;    // ratio^exponent
    int p = 1;
    double omega = 0.0;
    AreConvention convention = AreConvention::eq52;
};

/// Throws std::invalid_argument unless omega lies in (0, 1/(2p)).
AREResult pitman_are(const KernelSpec& kernel, int p, double omega,
                     AreConvention convention = AreConvention::eq52);

/// Local-power noncentralities under homoskedasticity:
///   psi = E[delta^2] / sqrt(2 b Omega)       (loss test)
///   xi  = E[delta^2] / (2 sqrt(2 d Omega))   (GLR test)
/// so psi / xi = sqrt(4d/b) whatever the inputs.
struct Noncentrality {
    double psi = 0.0;
    double xi = 0.0;
    double e_delta2 = 0.0;
    double omega_measure = 0.0;
};

Noncentrality noncentrality_pair(const KernelSpec& kernel, double e_delta2, double omega_measure, int p = 1);

/// Reference values (omega = 1/5, omega = 2/9) per kernel.
struct AreReference {
    KernelFamily family;
    double omega_one_fifth;
    double omega_two_ninths;
};

std::span<const AreReference> are_reference_values();

struct AreTableRow {
    KernelFamily family;
    double omega;
    double ratio;
    double are_eq52;
    double are_table1;
    std::optional<double> reference;  // only for omega = 1/5 or 2/9
};

/// ARE of all four kernels (p = 1) for each omega, both conventions.
std::vector<AreTableRow> are_table(std::span<const double> omegas);

std::string format_are_table_csv(std::span<const AreTableRow> rows);
std::string format_are_table_text(std::span<const AreTableRow> rows);

/// Explanation printed beside every table: the closed-form exponent and the
/// reference values disagree, and neither convention reproduces all
/// of the reference row.
std::string_view are_convention_note();

}  // namespace npspec
