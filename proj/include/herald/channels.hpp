#pragma once

// CPTP maps as Kraus families, including the flagged constructions: the
// generalized erasure channel, heralded channels with a fixed success count,
// and flagged switch channels. A flagged channel carries its classical
// register as the final output factor; each Kraus operator lives in exactly
// one flag sector, so outputs are block diagonal in the flag basis.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herald/qcore.hpp"
#include "herald/report.hpp"

namespace herald {

inline constexpr double kCompletenessTol = 1e-10;
inline constexpr int kMaxOutputDim = 4096;

/// Which positions ran the primary channel. For the erasure channel the
/// single position is either in the subset (success) or not (failure).
struct FlagLabel {
  std::vector<int> subset;  // 0-based, ascending
  int positions = 0;
  std::string name;

  bool operator==(const FlagLabel& o) const { return subset == o.subset && positions == o.positions; }
};

struct FlagSector {
  FlagLabel label;
  std::vector<Matrix> kraus;  // quantum part only: out_quantum x in
};

class KrausChannel {
 public:
  KrausChannel(std::string name, SpaceShape in, SpaceShape out, std::vector<Matrix> kraus);

  /// Flagged channel; the output shape is `quantum_out` with a flag factor of
  /// dimension sectors.size() appended.
  static KrausChannel flagged(std::string name, SpaceShape in, SpaceShape quantum_out,
                              std::vector<FlagSector> sectors);

  const std::string& name() const { return name_; }
  const SpaceShape& in_shape() const { return in_; }
  const SpaceShape& out_shape() const { return out_; }
  const SpaceShape& quantum_out_shape() const { return quantum_out_; }
  int in_dim() const { return in_.total(); }
  int out_dim() const { return out_.total(); }
  int quantum_out_dim() const { return quantum_out_.total(); }

  /// Full Kraus operators (out x in); for flagged channels K (x) |s>.
  const std::vector<Matrix>& kraus() const { return kraus_; }
  bool is_flagged() const { return !sectors_.empty(); }
  const std::vector<FlagSector>& sectors() const { return sectors_; }
  int flag_dim() const { return static_cast<int>(sectors_.size()); }
  /// Number of primary positions covered by the flag labels (0 if unflagged).
  int positions() const { return positions_; }

  /// ||sum K^dag K - I||_max.
  double completeness_error() const;

  /// Full input matrix -> full output matrix.
  Matrix apply_matrix(const Matrix& rho) const;
  /// Unnormalized per-sector quantum output blocks.
  std::vector<Matrix> apply_sectors(const Matrix& rho) const;

  KrausChannel with_name(std::string name) const;

 private:
  KrausChannel() = default;
  void build_full_kraus();

  std::string name_;
  SpaceShape in_;
  SpaceShape out_;
  SpaceShape quantum_out_;
  std::vector<Matrix> kraus_;
  std::vector<FlagSector> sectors_;
  int positions_ = 0;
};

/// Applies the channel to the factors listed in `acting_on`. The output
/// factors replace the acted-on factors at the position of the first one.
DensityOperator apply(const KrausChannel& channel, const DensityOperator& rho, std::vector<int> acting_on);
DensityOperator apply(const KrausChannel& channel, const DensityOperator& rho);

/// A Kraus family with at most in*out elements producing the same map.
std::vector<Matrix> minimal_kraus(const std::vector<Matrix>& kraus, int in_dim, int out_dim);

// ---- constructors ------------------------------------------------------------

KrausChannel identity_channel(int d);
/// rho -> (1 - p) rho + p I/d, via the Weyl operator basis.
KrausChannel depolarizing_channel(int d, double p);
/// Qubit dephasing: rho -> (1 - p) rho + p Z rho Z.
KrausChannel dephasing_channel(double p);
/// Constant channel Theta_sigma on `in`.
KrausChannel trivial_channel(const DensityOperator& sigma, const SpaceShape& in);
KrausChannel trivial_channel(int d);

/// Z_lambda(phi): lambda phi(rho) (x) |0><0| + (1 - lambda) sigma (x) |1><1|.
/// sigma defaults to the maximally mixed state on phi's output.
KrausChannel erasure_channel(const KrausChannel& phi, double lambda,
                             const std::optional<DensityOperator>& sigma = std::nullopt);

/// Z_k(phis) with every non-selected position replaced by Theta_sigma.
KrausChannel heralded_channel(const std::vector<KrausChannel>& phis, int k,
                              const std::optional<DensityOperator>& sigma = std::nullopt);

/// Z_k(phis; psis).
KrausChannel flagged_switch_channel(const std::vector<KrausChannel>& phis,
                                    const std::vector<KrausChannel>& psis, int k);

/// Z_k^n(phi) with n identical copies; k = 0 is accepted here (all positions
/// erased), which the binomial decomposition of erasure products needs.
KrausChannel heralded_power(const KrausChannel& phi, int n, int k,
                            const std::optional<DensityOperator>& sigma = std::nullopt);

/// phi (x) psi. Flag registers of flagged factors are merged into a single
/// final register, labels combined with psi's positions shifted past phi's.
KrausChannel tensor(const KrausChannel& phi, const KrausChannel& psi);
KrausChannel tensor_all(const std::vector<KrausChannel>& channels);
KrausChannel tensor_power(const KrausChannel& phi, int n);

/// Convex combination of flagged channels with pairwise distinct labels; the
/// result carries the union of all sectors, in argument order.
KrausChannel mix_flagged(const std::vector<KrausChannel>& channels, std::span<const double> weights,
                         std::string name);

/// Sectors permuted into the order of `labels` (same label set required).
KrausChannel reorder_sectors(const KrausChannel& channel, const std::vector<FlagLabel>& labels);

/// Normalized Choi state (id (x) phi)(Omega) on [in..., out...].
DensityOperator choi_matrix(const KrausChannel& phi);
/// || J(phi) - J(psi) ||_1 between normalized Choi states.
double choi_distance(const KrausChannel& phi, const KrausChannel& psi);
bool channels_equal(const KrausChannel& phi, const KrausChannel& psi, double tol = 1e-10);

/// Sum_k w[k] Z_k(phis), relabeled so its flag register matches the merged
/// register of Z_lambda(phi_1) (x) ... (x) Z_lambda(phi_n).
KrausChannel binomial_mixture_channel(const std::vector<KrausChannel>& phis, std::span<const double> weights,
                                      const std::optional<DensityOperator>& sigma = std::nullopt);
std::vector<double> binomial_weights(int n, double lambda);

/// Choi trace distance between (x)_j Z_lambda(phi_j) and the binomial mixture
/// of heralded channels. Limited to n <= 3.
BoundReport binomial_mixture_check(const std::vector<KrausChannel>& phis, double lambda,
                                   const std::optional<DensityOperator>& sigma = std::nullopt);

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> k_subsets(int n, int k);
double binomial(int n, int k);

}  // namespace herald
