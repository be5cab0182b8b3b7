#pragma once

// Entropy functionals in bits and the Alicki-Fannes continuity bounds.

#include <string>
#include <vector>

#include "herald/qcore.hpp"

namespace herald {

/// -sum l log2 l over eigenvalues clamped at 0. No normalization is applied,
/// so this is also -tr(M log M) for unnormalized PSD blocks.
double entropy_of_eigenvalues(const RealVector& values);
double entropy_of_matrix(const Matrix& m);

double von_neumann_entropy(const DensityOperator& rho);
/// Entropy of the marginal on `subsystems` (empty set -> 0).
double subsystem_entropy(const DensityOperator& rho, std::vector<int> subsystems);

/// S(AB) - S(B).
double conditional_entropy(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b);
/// S(A) + S(B) - S(AB).
double mutual_information(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b);
/// S(AC) + S(BC) - S(ABC) - S(C).
double conditional_mutual_information(const DensityOperator& rho, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c);

double binary_entropy(double p);

enum class AfVariant { refined, weak };

/// Refined: 2 delta log dA + (1 + delta) h(delta / (1 + delta)).
/// Weak: 2 delta log(2 dA / delta), 0 at delta = 0.
double alicki_fannes_bound(double delta, int dA, AfVariant variant);

enum class EntropyQuantity { entropy, conditional, mutual, conditional_mutual };

struct EntropyReport {
  EntropyQuantity quantity = EntropyQuantity::entropy;
  double value = 0.0;
  std::string state_fingerprint;
  std::string subsystems;  // e.g. "A=[0] B=[1]"
};

/// Evaluates one functional. Unused sets may be left empty; for `entropy`
/// the set `a` is measured.
EntropyReport evaluate_entropy(const DensityOperator& rho, EntropyQuantity q, const std::vector<int>& a,
                               const std::vector<int>& b = {}, const std::vector<int>& c = {});

const char* to_string(EntropyQuantity q);

}  // namespace herald
