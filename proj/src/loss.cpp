#include "npspec/loss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "npspec/text.hpp"

namespace npspec {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Below this |alpha z| the linex difference exp(x) - 1 - x is replaced by its
// series, which keeps full precision where the direct form cancels.
constexpr double kLinexSeriesThreshold = 1e-4;

LossValue linex(const LinexLoss& l, double z) {
    const double x = l.alpha * z;
    if (std::abs(x) < kLinexSeriesThreshold) {
        return {0.5 * l.beta * z * z * (1.0 + x / 3.0 + x * x / 12.0), false};
    }
    const double value = l.beta / (l.alpha * l.alpha) * (std::expm1(x) - x);
    if (!std::isfinite(value)) return {std::numeric_limits<double>::infinity(), true};
    return {value, false};
}

}  // namespace

void check_loss(const LossSpec& loss) {
    std::visit(Overloaded{
                   [](const QuadraticLoss&) {},
                   [](const TruncatedQuadraticLoss& l) {
                       if (!(l.c > 0.0) || !std::isfinite(l.c)) {
                           throw std::invalid_argument("truncated quadratic loss needs c > 0");
                       }
                   },
                   [](const LinexLoss& l) {
                       if (!std::isfinite(l.alpha) || !(l.beta > 0.0) || !std::isfinite(l.beta)) {
                           throw std::invalid_argument("linex loss needs finite alpha and beta > 0");
                       }
                   },
               },
               loss);
}

std::string to_string(const LossSpec& loss) {
    return std::visit(Overloaded{
                          [](const QuadraticLoss&) { return std::string("quadratic"); },
                          [](const TruncatedQuadraticLoss& l) { return "tq:" + text::format_double(l.c); },
                          [](const LinexLoss& l) {
                              return "linex:" + text::format_double(l.alpha) + "," +
                                     text::format_double(l.beta);
                          },
                      },
                      loss);
}

LossValue loss_eval_checked(const LossSpec& loss, double z) {
    return std::visit(Overloaded{
                          [&](const QuadraticLoss&) { return LossValue{z * z, false}; },
                          [&](const TruncatedQuadraticLoss& l) {
                              const double a = std::abs(z);
                              if (a <= l.c) return LossValue{0.5 * z * z, false};
                              return LossValue{l.c * a - 0.5 * l.c * l.c, false};
                          },
                          [&](const LinexLoss& l) { return linex(l, z); },
                      },
                      loss);
}

double loss_eval(const LossSpec& loss, double z) { return loss_eval_checked(loss, z).value; }

double loss_curvature(const LossSpec& loss) {
    return std::visit(Overloaded{
                          [](const QuadraticLoss&) { return 1.0; },
                          [](const TruncatedQuadraticLoss&) { return 0.5; },
                          [](const LinexLoss& l) { return 0.5 * l.beta; },
                      },
                      loss);
}

LossValidation validate_loss(const LossSpec& loss) {
    constexpr double step = 1e-5;
    LossValidation out;
    const double at0 = loss_eval(loss, 0.0);
    const double up = loss_eval(loss, step);
    const double down = loss_eval(loss, -step);

    out.zero_at_origin = at0 == 0.0;
    out.first_derivative = (up - down) / (2.0 * step);
    out.second_derivative = (up - 2.0 * at0 + down) / (step * step);
    out.flat_at_origin = std::abs(out.first_derivative) <= 1e-8;
    out.positive_curvature = out.second_derivative > 0.0 && std::isfinite(out.second_derivative);

    // Walk outward from 0 in both directions on a grid over [-10, 10].
    constexpr int points = 2000;
    constexpr double reach = 10.0;
    bool monotone = true;
    double prev_pos = at0;
    double prev_neg = at0;
    for (int i = 1; i <= points && monotone; ++i) {
        const double z = reach * i / points;
        const double pos = loss_eval(loss, z);
        const double neg = loss_eval(loss, -z);
        if (pos < prev_pos || neg < prev_neg || pos < 0.0 || neg < 0.0) monotone = false;
        prev_pos = pos;
        prev_neg = neg;
    }
    out.monotone = monotone;
    return out;
}

}  // namespace npspec
