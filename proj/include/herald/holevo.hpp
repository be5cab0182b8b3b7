#pragma once

// Holevo information of channels by ensemble optimization, with a fast path
// that uses the flag-sector block structure of flagged channels.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herald/channels.hpp"
#include "herald/qcore.hpp"
#include "herald/report.hpp"

namespace herald {

/// {p(x), rho_x} on the channel input space.
struct CQEnsemble {
  std::vector<double> probs;
  std::vector<DensityOperator> states;

  /// Throws InvalidArgument unless probs form a distribution (1e-12) and all
  /// states share one shape.
  void validate() const;
  int size() const { return static_cast<int>(probs.size()); }
};

/// Pure-state ensemble; the optimizer's working representation.
struct PureEnsemble {
  std::vector<double> probs;
  std::vector<Vector> vectors;

  CQEnsemble to_cq(const SpaceShape& shape) const;
  int size() const { return static_cast<int>(probs.size()); }
};

/// Product ensemble {p_x q_y, psi_x (x) phi_y}.
PureEnsemble product_ensemble(const PureEnsemble& a, const PureEnsemble& b);
/// m Haar-random pure states with uniform weights.
PureEnsemble random_pure_ensemble(int dim, int m, std::uint64_t seed);

struct HolevoOptions {
  int ensemble_size = 0;  // 0 -> d_in^2
  int restarts = 32;
  double tol = 1e-6;
  int max_iters = 500;
  std::uint64_t seed = 0;
  int max_input_dim = 64;
  /// Evaluated before the random restarts (e.g. product ensembles).
  std::vector<PureEnsemble> seed_ensembles;
};

struct RestartTrace {
  int index = 0;  // seed ensembles first, then random restarts
  bool seeded = false;
  int iterations = 0;
  bool converged = false;
  double initial = 0.0;
  double value = 0.0;
  std::vector<double> history;  // value after each iteration
};

/// Certified lower bound chi-hat on the Holevo information.
struct HolevoEstimate {
  double value = 0.0;
  PureEnsemble ensemble;
  std::vector<RestartTrace> trace;
  int best_restart = 0;
  std::uint64_t seed = 0;
  bool flagged_path = false;

  int restarts_used() const { return static_cast<int>(trace.size()); }
};

double holevo_of_ensemble(const KrausChannel& phi, const CQEnsemble& e);
/// I(X;B) for a pure ensemble; `use_sectors` evaluates per flag sector.
double holevo_of_pure_ensemble(const KrausChannel& phi, const PureEnsemble& e, bool use_sectors = false);

HolevoEstimate maximize_holevo(const KrausChannel& phi, const HolevoOptions& opts = {});
/// Same objective, evaluated as a sum over flag sectors. Requires flags.
HolevoEstimate maximize_holevo_flagged(const KrausChannel& phi, const HolevoOptions& opts = {});
/// Flagged path when the channel has flags, naive otherwise.
HolevoEstimate estimate_chi(const KrausChannel& phi, const HolevoOptions& opts = {});

enum class ChiPotMode { declared, strongly_additive, assisted_search };
enum class ChiPotTag { exact, exact_by_declaration, lower_bound };

struct ChiPotSpec {
  ChiPotMode mode = ChiPotMode::strongly_additive;
  double value = 0.0;  // declared mode
  std::vector<KrausChannel> assistants;
};

struct ChiPotValue {
  double value = 0.0;
  ChiPotTag tag = ChiPotTag::exact;
  std::string detail;
};

const char* to_string(ChiPotMode m);
const char* to_string(ChiPotTag t);

ChiPotValue chi_pot(const KrausChannel& phi, const ChiPotSpec& spec, const HolevoOptions& opts = {});

struct RegularizationProbe {
  int m = 1;
  double single = 0.0;    // chi-hat(phi)
  double per_use = 0.0;   // chi-hat(phi^{(x)m}) / m
  double gap = 0.0;       // per_use - single
};

/// m in {1, 2}; the m = 2 run is seeded with the product of the m = 1 optimum.
RegularizationProbe regularization_probe(const KrausChannel& phi, int m, const HolevoOptions& opts = {});

/// I(X; Z_k^n(phi)) for a fixed input ensemble on n copies, k = 0..n. Then one
/// report per pair k1 < k2 with lhs = I(k2) - I(k1) and rhs = (k2 - k1)
/// chi_pot. Diagnostics record whether monotonicity I(k2) >= I(k1) held.
std::vector<BoundReport> lemma52_check(const KrausChannel& phi, int n, const PureEnsemble& ensemble,
                                       double chi_pot_value,
                                       const std::optional<DensityOperator>& sigma = std::nullopt);

}  // namespace herald
