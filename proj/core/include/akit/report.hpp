#pragma once

#include <string>
#include <vector>

namespace akit {

enum class Status { pass, fail, precondition_failed };

const char* status_name(Status s);

/// A nonzero residual of an identity that was expected to vanish.
struct Residual {
  std::string label;
  std::string value;
};

struct Metric {
  std::string name;
  double value;
};

/// Outcome of one verification. Residuals list only the identities that failed.
struct CheckReport {
  std::string name;
  Status status = Status::pass;
  std::vector<Residual> residuals;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
  int identities_checked = 0;

  bool passed() const { return status == Status::pass; }

  /// Records one identity; a nonzero residual turns the report into a failure.
  void expect_zero(std::string label, bool is_zero, const std::string& rendered);
  void fail_with(std::string label, std::string value);
  /// Moves `other`'s residuals in under `prefix` and downgrades status if it failed.
  void absorb(const CheckReport& other, const std::string& prefix);
};

}  // namespace akit
