#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace superbroadcast::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInvalidArguments = 2,
};

/// Runs one command line. args excludes the program name. Results go to
/// `out` (or the --out file, written only on success), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Inclusive integer range written "A..B" or "A..B:STEP".
struct IntRange {
  int first = 0;
  int last = 0;
  int step = 1;
  std::vector<int> values() const;
};

/// Throws std::invalid_argument on malformed text, an empty range or step < 1.
IntRange parse_range(const std::string& text);

/// 12 significant digits, shortest form.
std::string format_number(double x);

}  // namespace superbroadcast::cli
