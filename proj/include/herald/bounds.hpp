#pragma once

// Explicit-constant capacity inequalities for heralded and erasure channels,
// each evaluated as a BoundReport.

#include <optional>
#include <string>
#include <vector>

#include "herald/channels.hpp"
#include "herald/esq.hpp"
#include "herald/holevo.hpp"
#include "herald/report.hpp"

namespace herald {

/// A correction term and the smallness hypothesis 3.1 d y <= 2 it needs.
/// value is +inf when the hypothesis fails.
struct CorrectionTerm {
  double value = 0.0;
  bool admissible = true;
  double hypothesis_value = 0.0;  // 3.1 d y
};

/// 6.2 d y log2(4 / (3.1 y)), y = (lambda_bar log2 d)^{1/4}; additive term for
/// a side channel with output dimension d.
CorrectionTerm correction_term(double lambda_bar, int d);
/// Same shape scaled by sum_k, for products of heralded channels.
CorrectionTerm additivity_correction(double lambda_bar, int d, int sum_k);
/// 6.2 d (1 + sum_k) y log2(d / (3.1 y)).
CorrectionTerm combined_correction(double lambda_bar, int d, int sum_k);
/// 6.2 d y log2(d / (3.1 y)) with y = (lambda log2 d)^{1/4}.
CorrectionTerm erasure_correction(double lambda, int d);
/// 3.1 d x log2(4 / (3.1 x)), x = (lambda_bar S)^{1/4}; 0 when S = 0.
double entropy_correction(double lambda_bar, double s_b0, int d);

/// One factor Z_k(phis; psis) of a product. Empty `psis` means constant
/// channels, i.e. the heralded channel Z_k(phis).
struct HeraldBlock {
  std::vector<KrausChannel> phis;
  std::vector<KrausChannel> psis;
  int k = 1;
  /// Per psi; empty -> strongly additive (chi-hat).
  std::vector<ChiPotSpec> psi_pot;

  int n() const { return static_cast<int>(phis.size()); }
  double lambda() const { return static_cast<double>(k) / n(); }
  KrausChannel channel() const;
  KrausChannel heralded() const;
};

struct HeraldSpec {
  std::vector<HeraldBlock> blocks;

  /// Throws InvalidArgument unless every block has 1 <= k <= n and matching
  /// psi lists.
  void validate() const;
  /// 1 / floor(min n_i / k_i), recomputed on every call.
  double lambda_bar() const;
  int sum_k() const;
  /// Largest quantum output dimension among the phis.
  int max_phi_out_dim() const;
  KrausChannel channel() const;
  KrausChannel heralded() const;
};

struct BoundsOptions {
  HolevoOptions holevo;
};

/// chi(Phi0 (x) Z) <= chi(Phi0) + chi(Z heralded) + sum (1 - k/n) sum_j chi_pot(psi)
/// + correction_term(lambda_bar, |B0|).
BoundReport thm41_bound(const KrausChannel& phi0, const HeraldSpec& spec, const BoundsOptions& opts = {});
/// chi(Z) <= sum (k/n) sum_j chi(phi) + sum (1 - k/n) sum_j chi_pot(psi) + additivity_correction.
/// The psi sum is reported over j <= n_i (used for the verdict) and j <= k_i.
BoundReport cor42_bound(const HeraldSpec& spec, const BoundsOptions& opts = {});
/// chi(Phi0 (x) Z) <= chi(Phi0) + sum (k/n) sum chi(phi) + sum (1 - k/n) sum chi_pot(psi)
/// + combined_correction.
BoundReport cor43_bound(const KrausChannel& phi0, const HeraldSpec& spec, const BoundsOptions& opts = {});

/// |chi(Z_lambda(phi)^{(x)n}) - chi(Z^n_{floor(lambda n)}(phi))| <= (1 + sqrt(n lambda (1 - lambda))) chi_pot.
BoundReport thm51_compare(const KrausChannel& phi, int n, double lambda, const ChiPotSpec& pot,
                          const BoundsOptions& opts = {}, double allowance = 1e-3);

/// chi(Z_lambda(phi)) <= lambda (chi(phi) + erasure_correction(lambda, d)).
BoundReport cor53_bound(const KrausChannel& phi, double lambda, const BoundsOptions& opts = {});

struct PostSelected {
  double lower = 0.0;  // chi-hat(Z_lambda) / lambda
  double upper = 0.0;  // cor53 rhs / lambda; +inf when the hypothesis fails
  BoundReport report;
};
PostSelected post_selected_capacity(const KrausChannel& phi, double lambda, const BoundsOptions& opts = {});

struct BlocksizeOptions {
  /// Replace the product-ensemble lhs by chi-hat of the full erasure product.
  bool evaluate_lhs = false;
  HolevoOptions holevo;
};

/// rhs = lambda sum F1 + lambda (1 - (1 - lambda)^{n-1}) sum (Fpot - F1).
/// Components carry the exact coefficient and the lambda^2 (n - 1) form.
BoundReport blocksize_bound(const std::vector<KrausChannel>& phis, double lambda, const std::vector<double>& f1,
                            const std::vector<double>& fpot, const BlocksizeOptions& opts = {});

/// |S(B0|B)_omega - S(B0|B)_sigma| against entropy_correction, with sigma the
/// best separable approximation of omega = (id (x) Z)(rho).
BoundReport thm33_check(const AveragingInput& input, const std::vector<HeraldFactor>& factors,
                        const SepOptions& sep = {});

}  // namespace herald
