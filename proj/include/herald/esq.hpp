#pragma once

// Squashed entanglement: upper bounds from explicit extensions, separable
// approximations, and the consistency checks built on them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herald/channels.hpp"
#include "herald/qcore.hpp"
#include "herald/report.hpp"

namespace herald {

struct EsqOptions {
  int ext_dim = 0;     // 0 -> dA * dB
  int kraus_rank = 2;  // raised so that ext_dim * kraus_rank >= rank(rho_AB)
  int restarts = 8;
  double tol = 1e-9;
  int max_iters = 300;
  std::uint64_t seed = 0;
  int max_ab_dim = 36;
  /// Candidate extensions on [A..., B..., C] evaluated before the search.
  std::vector<DensityOperator> seed_extensions;
};

struct EsqRestart {
  int index = 0;
  std::string kind;  // baseline, eigencopy, seed, random
  int iterations = 0;
  double initial = 0.0;
  double value = 0.0;
};

/// value = 1/2 I(A;B|C) of `extension`, an upper bound on E_sq(A;B).
struct EsqUpperBound {
  double value = 0.0;
  double baseline = 0.0;  // 1/2 I(A;B), the trivial extension
  std::optional<DensityOperator> extension;  // shape [dA, dB, dC]; absent if too large to assemble
  double marginal_error = 0.0;               // ||tr_C ext - rho_AB||_max
  std::vector<EsqRestart> trace;
  std::uint64_t seed = 0;
  /// Flag-conditioned evaluation: per-sector probability and bound.
  std::vector<std::string> sector_names;
  std::vector<double> sector_probs;
  std::vector<double> sector_values;
  std::vector<std::string> notes;

  bool at_baseline() const { return value >= baseline - 1e-12; }
};

/// Upper bound on E_sq(A;B)_rho; factors outside A and B are traced out.
EsqUpperBound esq_upper(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b,
                        const EsqOptions& opts = {});

/// Upper bound on E_sq(B0; output) for (id_B0 (x) Phi_{A})(rho). For flagged
/// channels the bound averages per-sector conditional bounds, which is the
/// value of an extension that keeps a copy of the flag.
EsqUpperBound esq_upper_through_channel(const DensityOperator& rho, const std::vector<int>& b0,
                                        const std::vector<int>& a, const KrausChannel& phi,
                                        const EsqOptions& opts = {});

/// Applies a channel on B to an extension on [A, B, C]; the result extends
/// (id (x) lambda_B)(rho_AB) and can be passed as a seed extension.
DensityOperator transfer_extension(const DensityOperator& extension, const KrausChannel& lambda_b);

struct AveragingInput {
  std::string name;
  DensityOperator rho;
  std::vector<int> b0;
  std::vector<int> a;
};

/// One heralded factor Z_k(Phi_1..Phi_n) of a tensor product.
struct HeraldFactor {
  std::vector<KrausChannel> phis;
  int k = 1;
};

/// E_sq(B0; Z(...)) <= S(B0) / L with L = min floor(n_i / k_i). One report
/// per input; lhs is an upper estimate, so a negative slack is inconclusive.
std::vector<BoundReport> heralded_averaging_check(const std::vector<HeraldFactor>& factors,
                                                  const std::vector<AveragingInput>& inputs,
                                                  const EsqOptions& opts = {}, double allowance = 1e-4);

struct SepOptions {
  int terms = 0;  // 0 -> min((dA dB)^2, 64)
  int restarts = 4;
  int max_iters = 400;
  std::uint64_t seed = 0;
  int max_ab_dim = 36;
};

/// sigma = sum_i q_i alpha_i (x) beta_i.
struct SeparableApprox {
  std::vector<double> q;
  std::vector<DensityOperator> alphas;
  std::vector<DensityOperator> betas;
  double distance = 0.0;  // ||rho_AB - sigma||_1
  std::vector<double> restart_values;
  std::uint64_t seed = 0;
};

DensityOperator assemble(const SeparableApprox& s);
/// Upper bound on min over separable sigma of ||rho_AB - sigma||_1.
SeparableApprox separable_approx(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b,
                                 const SepOptions& opts = {});

/// -lambda_min(rho^{T_B}) / ||W||_inf for the witness W built from the most
/// negative partial-transpose eigenvector; 0 if rho is PPT. A lower bound on
/// the distance to the separable set for any dimensions.
double ppt_witness_lower_bound(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b);

/// lhs = separable distance upper estimate, rhs = 3.1 |A| E_sq^{1/4} with the
/// esq upper estimate. Diagnostics carry the PPT lower bound.
BoundReport faithfulness_consistency(const DensityOperator& rho, const std::vector<int>& a,
                                     const std::vector<int>& b, const EsqOptions& esq_opts = {},
                                     const SepOptions& sep_opts = {});

/// State on [B, B1, ..., Bk] with analytic E_sq(B; B_j) for each j.
struct MonogamyCase {
  std::string name;
  DensityOperator rho;
  std::vector<double> analytic;
  std::string note;
};

std::vector<MonogamyCase> default_monogamy_suite();

/// Per case: lhs = sum_j analytic, rhs = S(B). Also checks that esq_upper
/// reproduces each analytic value within `reproduce_tol`.
std::vector<BoundReport> monogamy_harness(const std::vector<MonogamyCase>& suite, const EsqOptions& opts = {},
                                          double reproduce_tol = 5e-3);

namespace detail {

/// CMI of the extension generated by isometry V (rows c * r + k) and its
/// Euclidean gradient. `psi` is a purification matrix dAB x dE.
double esq_objective(const Matrix& psi, const Matrix& v, int dA, int dB, int dC, int r, Matrix* grad);
/// max |analytic - central difference| over random directions.
double esq_gradient_check(int dA, int dB, int dC, int r, std::uint64_t seed);

}  // namespace detail

}  // namespace herald
