#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npspec/kernels.hpp"
#include "npspec/loss.hpp"
#include "npspec/smoothing.hpp"
#include "npspec/stats.hpp"

// Option-string grammars shared by the command line and the experiment
// config files. Every parser throws std::invalid_argument with a message that
// quotes the offending text and the accepted forms.

namespace npspec::grammar {

/// uniform | epanechnikov | biweight | triweight
KernelSpec parse_kernel(std::string_view text);

/// quadratic | tq:<c> | linex:<alpha>,<beta>
LossSpec parse_loss(std::string_view text);

/// fixed:<h> | rot:<omega> | cv:<c1>,<c2>,<grid>   (omega may be a fraction, e.g. 2/9)
BandwidthSelector parse_bandwidth(std::string_view text);

/// One test: q | q0 | glr | f, the first two optionally followed by
/// [<loss>], e.g. q[linex:0.5,1]. A bare q or q0 uses quadratic loss.
TestSpec parse_test(std::string_view text);

/// Comma separated tests; commas inside brackets belong to the loss.
std::vector<TestSpec> parse_test_list(std::string_view text);

/// As above, but a bare q or q0 expands to one test per loss in `losses`.
std::vector<TestSpec> parse_test_list(std::string_view text, std::span<const LossSpec> losses);

std::string format_test_list(std::span<const TestSpec> tests);

/// Comma separated decimals or fractions.
std::vector<double> parse_number_list(std::string_view text);

struct GrammarExample {
    std::string_view option;
    std::string_view text;
};

/// The example strings quoted in --help, one or more per accepted token.
std::span<const GrammarExample> documented_examples();

/// Help paragraph describing every grammar, built from documented_examples().
std::string grammar_help();

}  // namespace npspec::grammar
