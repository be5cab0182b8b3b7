#include "herald/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace herald {

namespace {

void check_sets(const DensityOperator& rho, std::initializer_list<const std::vector<int>*> sets) {
  std::set<int> seen;
  for (const auto* s : sets) {
    for (int i : *s) {
      if (i < 0 || i >= rho.shape().size()) throw InvalidArgument("entropy: subsystem index out of range");
      if (!seen.insert(i).second) throw InvalidArgument("entropy: subsystem sets overlap");
    }
  }
}

std::vector<int> join(std::initializer_list<const std::vector<int>*> sets) {
  std::vector<int> out;
  for (const auto* s : sets) out.insert(out.end(), s->begin(), s->end());
  return out;
}

std::string set_string(const std::vector<int>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

}  // namespace

double entropy_of_eigenvalues(const RealVector& values) {
  double s = 0.0;
  for (double l : values) {
    if (l > 0.0) s -= l * std::log2(l);
  }
  return s;
}

double entropy_of_matrix(const Matrix& m) {
  if (m.rows() == 1) {
    double l = m(0, 0).real();
    return l > 0.0 ? -l * std::log2(l) : 0.0;
  }
  return entropy_of_eigenvalues(eigvals_hermitian(m));
}

double von_neumann_entropy(const DensityOperator& rho) { return entropy_of_matrix(rho.matrix()); }

double subsystem_entropy(const DensityOperator& rho, std::vector<int> subsystems) {
  if (subsystems.empty()) return 0.0;
  std::sort(subsystems.begin(), subsystems.end());
  if (static_cast<int>(subsystems.size()) == rho.shape().size()) return von_neumann_entropy(rho);
  return entropy_of_matrix(partial_trace(rho.matrix(), rho.shape().dims(), subsystems));
}

double conditional_entropy(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b) {
  check_sets(rho, {&a, &b});
  return subsystem_entropy(rho, join({&a, &b})) - subsystem_entropy(rho, b);
}

double mutual_information(const DensityOperator& rho, const std::vector<int>& a, const std::vector<int>& b) {
  check_sets(rho, {&a, &b});
  return subsystem_entropy(rho, a) + subsystem_entropy(rho, b) - subsystem_entropy(rho, join({&a, &b}));
}

double conditional_mutual_information(const DensityOperator& rho, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c) {
  check_sets(rho, {&a, &b, &c});
  const double s_ac = subsystem_entropy(rho, join({&a, &c}));
  const double s_bc = subsystem_entropy(rho, join({&b, &c}));
  const double s_abc = subsystem_entropy(rho, join({&a, &b, &c}));
  const double s_c = subsystem_entropy(rho, c);
  return (s_ac - s_abc) + (s_bc - s_c);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double alicki_fannes_bound(double delta, int dA, AfVariant variant) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("alicki_fannes_bound: delta outside [0,1]");
  if (dA < 2) throw InvalidArgument("alicki_fannes_bound: dA must be >= 2");
  if (variant == AfVariant::refined) {
    return 2.0 * delta * std::log2(dA) + (1.0 + delta) * binary_entropy(delta / (1.0 + delta));
  }
  if (delta == 0.0) return 0.0;
  return 2.0 * delta * std::log2(2.0 * dA / delta);
}

EntropyReport evaluate_entropy(const DensityOperator& rho, EntropyQuantity q, const std::vector<int>& a,
                               const std::vector<int>& b, const std::vector<int>& c) {
  EntropyReport r;
  r.quantity = q;
  r.state_fingerprint = fingerprint(rho);
  switch (q) {
    case EntropyQuantity::entropy:
      check_sets(rho, {&a});
      r.value = subsystem_entropy(rho, a);
      r.subsystems = "A=" + set_string(a);
      break;
    case EntropyQuantity::conditional:
      r.value = conditional_entropy(rho, a, b);
      r.subsystems = "A=" + set_string(a) + " B=" + set_string(b);
      break;
    case EntropyQuantity::mutual:
      r.value = mutual_information(rho, a, b);
      r.subsystems = "A=" + set_string(a) + " B=" + set_string(b);
      break;
    case EntropyQuantity::conditional_mutual:
      r.value = conditional_mutual_information(rho, a, b, c);
      r.subsystems = "A=" + set_string(a) + " B=" + set_string(b) + " C=" + set_string(c);
      break;
  }
  if (!std::isfinite(r.value)) throw Error("entropy: non-finite value");
  return r;
}

const char* to_string(EntropyQuantity q) {
  switch (q) {
    case EntropyQuantity::entropy:
      return "S";
    case EntropyQuantity::conditional:
      return "S(A|B)";
    case EntropyQuantity::mutual:
      return "I(A;B)";
    case EntropyQuantity::conditional_mutual:
      return "I(A;B|C)";
  }
  return "?";
}

}  // namespace herald
