#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nullgauge {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  exit_pass = 0,
  exit_check_failed = 1,
  exit_input_error = 2,
  exit_degenerate = 3,
  exit_blowup = 4,
};

/// Runs one command line (without the program name). The report goes to
/// `out` as key=value lines, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nullgauge
