#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lexcomp/lexfeatures.hpp"

namespace lexcomp::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless --out redirects them; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses `NAME=KIND:PATH` where KIND is one of freq, freq-lemma, freq-char,
/// level, familiarity or external, and loads the resource.
FeatureSource load_resource(const std::string& spec);

}  // namespace lexcomp::cli
