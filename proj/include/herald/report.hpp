#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace herald {

/// Slack below this is not a PASS.
inline constexpr double kPassSlack = -1e-6;

enum class Verdict { pass, inconclusive };

enum class Provenance { analytic, estimate, declared };

const char* to_string(Verdict v);
const char* to_string(Provenance p);

/// Evaluated sides of one inequality. `rhs` may be +inf when a hypothesis
/// of the inequality is not met; the verdict then says so.
struct BoundReport {
  std::string id;
  double lhs = 0.0;
  Provenance lhs_provenance = Provenance::estimate;
  double rhs = 0.0;
  std::vector<std::pair<std::string, double>> rhs_components;
  double slack = 0.0;
  Verdict verdict = Verdict::pass;
  std::string reason;  // set when inconclusive
  std::string inputs_fingerprint;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::string> notes;

  bool passed() const { return verdict == Verdict::pass; }
  double component(const std::string& name) const;
  double diagnostic(const std::string& name) const;
};

/// Fills slack and verdict from lhs/rhs. `allowance` widens the PASS region;
/// `surrogate` names the one-sided estimate blamed when slack is negative.
void settle(BoundReport& r, const std::string& surrogate, double allowance = 0.0);
/// Marks the report INCONCLUSIVE because a hypothesis of the bound fails.
void mark_hypothesis_failed(BoundReport& r, const std::string& detail);

}  // namespace herald
