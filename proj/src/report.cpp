#include "herald/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace herald {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::analytic:
      return "analytic";
    case Provenance::estimate:
      return "estimate";
    case Provenance::declared:
      return "declared";
  }
  return "?";
}

namespace {

double lookup(const std::vector<std::pair<std::string, double>>& items, const std::string& name) {
  for (const auto& [k, v] : items) {
    if (k == name) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double BoundReport::component(const std::string& name) const { return lookup(rhs_components, name); }

double BoundReport::diagnostic(const std::string& name) const { return lookup(diagnostics, name); }

void settle(BoundReport& r, const std::string& surrogate, double allowance) {
  r.slack = r.rhs - r.lhs;
  const double floor = -std::max(-kPassSlack, allowance);
  if (std::isnan(r.slack)) {
    r.verdict = Verdict::inconclusive;
    r.reason = "non-finite comparison";
    return;
  }
  if (r.slack >= floor) {
    r.verdict = Verdict::pass;
    r.reason.clear();
    return;
  }
  r.verdict = Verdict::inconclusive;
  std::ostringstream os;
  os << "slack " << r.slack << " below " << floor << "; one-sided estimate: " << surrogate;
  r.reason = os.str();
}

void mark_hypothesis_failed(BoundReport& r, const std::string& detail) {
  r.rhs = std::numeric_limits<double>::infinity();
  r.slack = std::numeric_limits<double>::infinity();
  r.verdict = Verdict::inconclusive;
  r.reason = "hypothesis not met: " + detail;
}

}  // namespace herald
