#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "akit/cli/document.hpp"
#include "akit/report.hpp"

namespace akit::cli {

struct Flags {
  int steps = 1000;
  double tol = 1e-6;
  /// Extra seeded sample points for check-transversality.
  int samples = 3;
  bool json = false;
  bool horizontal = false;
  bool vertical = false;
  /// Forms for chain-homotopy; empty means the generators and their pairwise wedges.
  std::vector<std::string> forms;
};

/// Thrown for a bad command line or a document lacking what the command needs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

/// Runs one command on the named blocks (all blocks of the relevant kind when
/// `names` is empty). Throws UsageError, DocumentError or core errors.
std::vector<CheckReport> run_command(const std::string& command, const Document& doc,
                                     const std::vector<std::string>& names, const Flags& flags);

/// 0 when every report passed, 1 otherwise.
int exit_status(const std::vector<CheckReport>& reports);

std::string render_text(const std::string& command, const std::vector<CheckReport>& reports);
std::string render_json(const std::string& command, const std::vector<CheckReport>& reports);

/// Whole program: argument parsing, document loading, dispatch and output.
/// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace akit::cli
