#include "akit/report.hpp"

namespace akit {

const char* status_name(Status s) {
  switch (s) {
    case Status::pass:
      return "PASS";
    case Status::fail:
      return "FAIL";
    case Status::precondition_failed:
      return "PRECONDITION_FAILED";
  }
  return "?";
}

void CheckReport::expect_zero(std::string label, bool is_zero, const std::string& rendered) {
  ++identities_checked;
  if (!is_zero) fail_with(std::move(label), rendered);
}

void CheckReport::fail_with(std::string label, std::string value) {
  if (status == Status::pass) status = Status::fail;
  residuals.push_back({std::move(label), std::move(value)});
}

void CheckReport::absorb(const CheckReport& other, const std::string& prefix) {
  identities_checked += other.identities_checked;
  for (const auto& r : other.residuals) residuals.push_back({prefix + r.label, r.value});
  for (const auto& n : other.notes) notes.push_back(prefix + n);
  if (other.status != Status::pass && status == Status::pass) status = other.status;
}

}  // namespace akit
