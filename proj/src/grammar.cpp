#include "npspec/grammar.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "npspec/text.hpp"

namespace npspec::grammar {
namespace {

[[noreturn]] void fail(std::string_view what, std::string_view text, std::string_view forms) {
    throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(text) + "'; expected " +
                                std::string(forms));
}

constexpr std::string_view kKernelForms = "uniform | epanechnikov | biweight | triweight";
constexpr std::string_view kLossForms = "quadratic | tq:<c> | linex:<alpha>,<beta>";
constexpr std::string_view kBandwidthForms = "fixed:<h> | rot:<omega> | cv:<c1>,<c2>,<grid>";
constexpr std::string_view kTestForms = "q | q0 | glr | f, with q and q0 optionally taking [<loss>]";

std::optional<double> finite_number(std::string_view token, bool allow_fraction) {
    const auto v = allow_fraction ? text::parse_rational(token) : text::parse_double(token);
    if (!v || !std::isfinite(*v)) return std::nullopt;
    return v;
}

constexpr std::array kExamples{
    GrammarExample{"--kernel", "uniform"},
    GrammarExample{"--kernel", "epanechnikov"},
    GrammarExample{"--kernel", "biweight"},
    GrammarExample{"--kernel", "triweight"},
    GrammarExample{"--loss", "quadratic"},
    GrammarExample{"--loss", "tq:1"},
    GrammarExample{"--loss", "linex:0.5,1"},
    GrammarExample{"--bandwidth", "fixed:0.3"},
    GrammarExample{"--bandwidth", "rot:2/9"},
    GrammarExample{"--bandwidth", "rot:0.2"},
    GrammarExample{"--bandwidth", "cv:0.5,2,20"},
    GrammarExample{"--tests", "q"},
    GrammarExample{"--tests", "q0"},
    GrammarExample{"--tests", "glr"},
    GrammarExample{"--tests", "f"},
    GrammarExample{"--tests", "q[linex:0.2,1],q0[tq:1],glr"},
};

}  // namespace

KernelSpec parse_kernel(std::string_view text) {
    const auto family = parse_kernel_family(text::trim(text));
    if (!family) fail("kernel", text, kKernelForms);
    return KernelSpec{*family};
}

LossSpec parse_loss(std::string_view text) {
    const std::string_view t = text::trim(text);
    LossSpec loss;
    if (t == "quadratic") {
        loss = QuadraticLoss{};
    } else if (t.starts_with("tq:")) {
        const auto c = finite_number(t.substr(3), false);
        if (!c || *c <= 0.0) fail("loss", text, "tq:<c> with c > 0");
        loss = TruncatedQuadraticLoss{*c};
    } else if (t.starts_with("linex:")) {
        const auto parts = text::split(t.substr(6), ',');
        if (parts.size() != 2) fail("loss", text, "linex:<alpha>,<beta>");
        const auto alpha = finite_number(parts[0], false);
        const auto beta = finite_number(parts[1], false);
        if (!alpha || !beta || *beta <= 0.0) fail("loss", text, "linex:<alpha>,<beta> with beta > 0");
        loss = LinexLoss{*alpha, *beta};
    } else {
        fail("loss", text, kLossForms);
    }
    return loss;
}

BandwidthSelector parse_bandwidth(std::string_view text) {
    const std::string_view t = text::trim(text);
    BandwidthSelector sel;
    if (t.starts_with("fixed:")) {
        const auto h = finite_number(t.substr(6), true);
        if (!h || *h <= 0.0) fail("bandwidth", text, "fixed:<h> with h > 0");
        sel.rule = BandwidthRule::fixed;
        sel.value = *h;
    } else if (t.starts_with("rot:")) {
        const auto omega = finite_number(t.substr(4), true);
        if (!omega || *omega <= 0.0) fail("bandwidth", text, "rot:<omega> with omega > 0, e.g. rot:2/9");
        sel.rule = BandwidthRule::rot;
        sel.value = *omega;
    } else if (t.starts_with("cv:")) {
        const auto parts = text::split(t.substr(3), ',');
        if (parts.size() != 3) fail("bandwidth", text, "cv:<c1>,<c2>,<grid>");
        const auto c1 = finite_number(parts[0], true);
        const auto c2 = finite_number(parts[1], true);
        const auto grid = text::parse_integer(parts[2]);
        if (!c1 || !c2 || !grid || *c1 <= 0.0 || *c2 <= *c1 || *grid < 2 || *grid > 100000) {
            fail("bandwidth", text, "cv:<c1>,<c2>,<grid> with 0 < c1 < c2 and grid >= 2");
        }
        sel.rule = BandwidthRule::cv;
        sel.value = 0.0;
        sel.cv = CvSettings{*c1, *c2, static_cast<int>(*grid)};
    } else {
        fail("bandwidth", text, kBandwidthForms);
    }
    return sel;
}

TestSpec parse_test(std::string_view text) {
    std::string_view t = text::trim(text);
    TestSpec spec;
    std::string_view head = t;
    std::optional<std::string_view> loss_text;
    if (const auto open = t.find('['); open != std::string_view::npos) {
        if (!t.ends_with(']')) fail("test", text, kTestForms);
        head = t.substr(0, open);
        loss_text = t.substr(open + 1, t.size() - open - 2);
    }
    const auto method = parse_test_method(text::trim(head));
    if (!method) fail("test", text, kTestForms);
    spec.method = *method;
    if (loss_text) {
        if (!spec.uses_loss()) fail("test", text, "a loss only after q or q0");
        spec.loss = parse_loss(*loss_text);
    }
    return spec;
}

std::vector<TestSpec> parse_test_list(std::string_view text) { return parse_test_list(text, {}); }

std::vector<TestSpec> parse_test_list(std::string_view text, std::span<const LossSpec> losses) {
    std::vector<TestSpec> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const char ch = i < text.size() ? text[i] : ',';
        if (ch == '[') ++depth;
        if (ch == ']') --depth;
        if (depth < 0) fail("test list", text, kTestForms);
        if (ch == ',' && depth == 0) {
            const std::string_view item = text.substr(start, i - start);
            TestSpec test = parse_test(item);
            if (test.uses_loss() && !losses.empty() && item.find('[') == std::string_view::npos) {
                for (const auto& loss : losses) out.push_back(TestSpec{test.method, loss});
            } else {
                out.push_back(test);
            }
            start = i + 1;
        }
    }
    if (depth != 0) fail("test list", text, kTestForms);
    return out;
}

std::string format_test_list(std::span<const TestSpec> tests) {
    std::string out;
    for (const auto& t : tests) {
        if (!out.empty()) out += ',';
        out += t.label();
    }
    return out;
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    for (auto token : text::split(text, ',')) {
        const auto v = finite_number(token, true);
        if (!v) fail("number list", text, "comma separated numbers, e.g. 0.1,0.2,1/5");
        out.push_back(*v);
    }
    return out;
}

std::span<const GrammarExample> documented_examples() { return kExamples; }

std::string grammar_help() {
    std::string out;
    out += "Option grammars:\n";
    out += "  kernel     " + std::string(kKernelForms) + "\n";
    out += "  loss       " + std::string(kLossForms) + "\n";
    out += "  bandwidth  " + std::string(kBandwidthForms) + "  (omega may be a fraction)\n";
    out += "  tests      comma list of " + std::string(kTestForms) + "\n";
    out += "Examples:\n";
    for (const auto& ex : kExamples) out += "  " + std::string(ex.option) + " " + std::string(ex.text) + "\n";
    return out;
}

}  // namespace npspec::grammar
