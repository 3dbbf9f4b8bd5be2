#pragma once

#include <iosfwd>

namespace npspec::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDegenerate = 3;

/// The npspec command line. Subcommands: test, gen, mc, are, are-table,
/// constants. Returns the process exit status; never calls exit().
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace npspec::cli
