#include "herald/bounds.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "herald/entropy.hpp"

namespace herald {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lambda_bar(double lb, const char* who) {
  if (!(lb > 0.0 && lb <= 1.0)) throw InvalidArgument(std::string(who) + ": lambda must lie in (0, 1]");
}

double y_of(double lambda, int d) { return std::pow(lambda * std::log2(static_cast<double>(d)), 0.25); }

/// prefactor * y * log2(num / (3.1 y)) under 3.1 d y <= 2.
CorrectionTerm shaped(double lambda, int d, double prefactor, double num) {
  if (d < 2) throw InvalidArgument("correction: dimension must be >= 2");
  CorrectionTerm c;
  const double y = y_of(lambda, d);
  c.hypothesis_value = 3.1 * d * y;
  c.admissible = c.hypothesis_value <= 2.0;
  if (!c.admissible) {
    c.value = kInf;
    return c;
  }
  c.value = prefactor * y * std::log2(num / (3.1 * y));
  return c;
}

std::string hypothesis_text(const CorrectionTerm& c) {
  std::ostringstream os;
  os << "3.1 d (lambda log d)^(1/4) = " << c.hypothesis_value << " > 2";
  return os.str();
}

std::string channels_fingerprint(const std::vector<std::string>& names, double extra = 0.0) {
  std::string s;
  for (const auto& n : names) s += n + ";";
  std::ostringstream os;
  os.precision(17);
  os << extra;
  s += os.str();
  return hex64(fnv1a64(s));
}

int quantum_out(const KrausChannel& c) { return c.quantum_out_dim(); }

/// chi-hat per channel name within one evaluation.
class ChiCache {
 public:
  explicit ChiCache(const HolevoOptions& o) : opts_(o) {}
  double operator()(const KrausChannel& c) {
    auto it = values_.find(c.name());
    if (it != values_.end()) return it->second;
    const double v = estimate_chi(c, opts_).value;
    values_.emplace(c.name(), v);
    return v;
  }

 private:
  HolevoOptions opts_;
  std::map<std::string, double> values_;
};

struct PotSums {
  double over_n = 0.0;  // sum_i (1 - k_i/n_i) sum_{j <= n_i}
  double over_k = 0.0;  // sum_i (1 - k_i/n_i) sum_{j <= k_i}
  bool all_exact = true;
};

PotSums pot_sums(const HeraldSpec& spec, const HolevoOptions& opts) {
  PotSums s;
  for (const auto& b : spec.blocks) {
    if (b.psis.empty()) continue;  // constant channels: chi_pot = 0
    const double w = 1.0 - b.lambda();
    for (int j = 0; j < b.n(); ++j) {
      const auto u = static_cast<std::size_t>(j);
      const ChiPotSpec ps = b.psi_pot.empty() ? ChiPotSpec{} : b.psi_pot[u];
      const ChiPotValue v = chi_pot(b.psis[u], ps, opts);
      if (v.tag == ChiPotTag::lower_bound) s.all_exact = false;
      s.over_n += w * v.value;
      if (j < b.k) s.over_k += w * v.value;
    }
  }
  return s;
}

double average_phi_sum(const HeraldSpec& spec, ChiCache& chi) {
  double s = 0.0;
  for (const auto& b : spec.blocks) {
    double inner = 0.0;
    for (const auto& p : b.phis) inner += chi(p);
    s += b.lambda() * inner;
  }
  return s;
}

std::vector<std::string> spec_names(const HeraldSpec& spec) {
  std::vector<std::string> names;
  for (const auto& b : spec.blocks) names.push_back(b.channel().name());
  return names;
}

void finish(BoundReport& r, const CorrectionTerm& c, const std::string& surrogate, bool pot_exact) {
  r.rhs_components.emplace_back("hypothesis", c.hypothesis_value);
  if (!c.admissible) {
    mark_hypothesis_failed(r, hypothesis_text(c));
    return;
  }
  settle(r, pot_exact ? surrogate : surrogate + " and chi_pot lower bounds");
}

}  // namespace

CorrectionTerm correction_term(double lambda_bar, int d) {
  check_lambda_bar(lambda_bar, "correction_term");
  return shaped(lambda_bar, d, 6.2 * d, 4.0);
}

CorrectionTerm additivity_correction(double lambda_bar, int d, int sum_k) {
  check_lambda_bar(lambda_bar, "additivity_correction");
  return shaped(lambda_bar, d, 6.2 * d * sum_k, 4.0);
}

CorrectionTerm combined_correction(double lambda_bar, int d, int sum_k) {
  check_lambda_bar(lambda_bar, "combined_correction");
  return shaped(lambda_bar, d, 6.2 * d * (1 + sum_k), static_cast<double>(d));
}

CorrectionTerm erasure_correction(double lambda, int d) {
  check_lambda_bar(lambda, "erasure_correction");
  return shaped(lambda, d, 6.2 * d, static_cast<double>(d));
}

double entropy_correction(double lambda_bar, double s_b0, int d) {
  check_lambda_bar(lambda_bar, "entropy_correction");
  if (s_b0 <= 0.0) return 0.0;
  const double x = std::pow(lambda_bar * s_b0, 0.25);
  return 3.1 * d * x * std::log2(4.0 / (3.1 * x));
}

// ---- HeraldSpec ----------------------------------------------------------------

KrausChannel HeraldBlock::channel() const {
  if (psis.empty()) return heralded();
  return flagged_switch_channel(phis, psis, k);
}

KrausChannel HeraldBlock::heralded() const { return heralded_channel(phis, k); }

void HeraldSpec::validate() const {
  if (blocks.empty()) throw InvalidArgument("HeraldSpec: no blocks");
  for (const auto& b : blocks) {
    if (b.phis.empty()) throw InvalidArgument("HeraldSpec: empty channel list");
    if (b.k < 1 || b.k > b.n()) throw InvalidArgument("HeraldSpec: need 1 <= k <= n");
    if (!b.psis.empty() && b.psis.size() != b.phis.size()) {
      throw InvalidArgument("HeraldSpec: psi list length differs from phi list");
    }
    if (!b.psi_pot.empty() && b.psi_pot.size() != b.psis.size()) {
      throw InvalidArgument("HeraldSpec: one chi_pot spec per psi required");
    }
  }
}

double HeraldSpec::lambda_bar() const {
  validate();
  int L = std::numeric_limits<int>::max();
  for (const auto& b : blocks) L = std::min(L, b.n() / b.k);
  return 1.0 / L;
}

int HeraldSpec::sum_k() const {
  int s = 0;
  for (const auto& b : blocks) s += b.k;
  return s;
}

int HeraldSpec::max_phi_out_dim() const {
  int d = 0;
  for (const auto& b : blocks) {
    for (const auto& p : b.phis) d = std::max(d, quantum_out(p));
  }
  return d;
}

KrausChannel HeraldSpec::channel() const {
  validate();
  std::vector<KrausChannel> parts;
  for (const auto& b : blocks) parts.push_back(b.channel());
  return tensor_all(parts);
}

KrausChannel HeraldSpec::heralded() const {
  validate();
  std::vector<KrausChannel> parts;
  for (const auto& b : blocks) parts.push_back(b.heralded());
  return tensor_all(parts);
}

// ---- capacity bounds -------------------------------------------------------------

BoundReport thm41_bound(const KrausChannel& phi0, const HeraldSpec& spec, const BoundsOptions& opts) {
  const double lb = spec.lambda_bar();
  ChiCache chi(opts.holevo);
  const KrausChannel z = spec.channel();
  BoundReport r;
  r.id = "thm41";
  r.seed = opts.holevo.seed;
  auto names = spec_names(spec);
  names.push_back(phi0.name());
  r.inputs_fingerprint = channels_fingerprint(names);
  const HolevoEstimate lhs_est = estimate_chi(tensor(phi0, z), opts.holevo);
  r.lhs = lhs_est.value;
  r.diagnostics.emplace_back("restarts_used", lhs_est.restarts_used());
  const double c0 = chi(phi0);
  const double cz = chi(spec.heralded());
  const PotSums pot = pot_sums(spec, opts.holevo);
  const CorrectionTerm corr = correction_term(lb, quantum_out(phi0));
  r.rhs = c0 + cz + pot.over_n + corr.value;
  r.rhs_components = {{"chi(Phi0)", c0}, {"chi(heralded)", cz}, {"pot_sum", pot.over_n},
                      {"correction", corr.value}, {"lambda_bar", lb}};
  finish(r, corr, "chi-hat of the rhs channels", pot.all_exact);
  return r;
}

BoundReport cor42_bound(const HeraldSpec& spec, const BoundsOptions& opts) {
  const double lb = spec.lambda_bar();
  ChiCache chi(opts.holevo);
  BoundReport r;
  r.id = "cor42";
  r.seed = opts.holevo.seed;
  r.inputs_fingerprint = channels_fingerprint(spec_names(spec));
  const HolevoEstimate lhs_est = estimate_chi(spec.channel(), opts.holevo);
  r.lhs = lhs_est.value;
  const double avg = average_phi_sum(spec, chi);
  const PotSums pot = pot_sums(spec, opts.holevo);
  const CorrectionTerm corr = additivity_correction(lb, spec.max_phi_out_dim(), spec.sum_k());
  r.rhs = avg + pot.over_n + corr.value;
  r.rhs_components = {{"average_chi", avg},        {"pot_sum_j<=n", pot.over_n}, {"pot_sum_j<=k", pot.over_k},
                      {"correction", corr.value}, {"lambda_bar", lb}};
  const double rhs_k = avg + pot.over_k + corr.value;
  r.diagnostics = {{"rhs_j<=k", rhs_k}, {"slack_j<=k", rhs_k - r.lhs},
                   {"restarts_used", static_cast<double>(lhs_est.restarts_used())}};
  if (pot.over_n != pot.over_k) r.notes.push_back("psi sums over j <= n_i and j <= k_i differ");
  finish(r, corr, "chi-hat of the constituent channels", pot.all_exact);
  return r;
}

BoundReport cor43_bound(const KrausChannel& phi0, const HeraldSpec& spec, const BoundsOptions& opts) {
  const double lb = spec.lambda_bar();
  ChiCache chi(opts.holevo);
  BoundReport r;
  r.id = "cor43";
  r.seed = opts.holevo.seed;
  auto names = spec_names(spec);
  names.push_back(phi0.name());
  r.inputs_fingerprint = channels_fingerprint(names);
  const HolevoEstimate lhs_est = estimate_chi(tensor(phi0, spec.channel()), opts.holevo);
  r.lhs = lhs_est.value;
  r.diagnostics.emplace_back("restarts_used", lhs_est.restarts_used());
  const double c0 = chi(phi0);
  const double avg = average_phi_sum(spec, chi);
  const PotSums pot = pot_sums(spec, opts.holevo);
  const int d = std::max(spec.max_phi_out_dim(), quantum_out(phi0));
  const CorrectionTerm corr = combined_correction(lb, d, spec.sum_k());
  r.rhs = c0 + avg + pot.over_n + corr.value;
  r.rhs_components = {{"chi(Phi0)", c0}, {"average_chi", avg}, {"pot_sum", pot.over_n},
                      {"correction", corr.value}, {"lambda_bar", lb}};
  finish(r, corr, "chi-hat of the constituent channels", pot.all_exact);
  return r;
}

BoundReport thm51_compare(const KrausChannel& phi, int n, double lambda, const ChiPotSpec& pot,
                          const BoundsOptions& opts, double allowance) {
  if (n < 1 || n > 3) throw GuardExceeded("thm51_compare: n must be in 1..3");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("thm51_compare: lambda must lie in [0, 1]");
  const int k = static_cast<int>(std::floor(lambda * n + 1e-12));
  const KrausChannel erased = tensor_power(erasure_channel(phi, lambda), n);
  const KrausChannel heralded = heralded_power(phi, n, k);
  BoundReport r;
  r.id = "thm51";
  r.seed = opts.holevo.seed;
  r.inputs_fingerprint = channels_fingerprint({phi.name()}, lambda * 1000 + n);
  const HolevoEstimate ea = estimate_chi(erased, opts.holevo);
  const HolevoEstimate eb = estimate_chi(heralded, opts.holevo);
  const double a = ea.value;
  const double b = eb.value;
  r.lhs = std::abs(a - b);
  const ChiPotValue cp = chi_pot(phi, pot, opts.holevo);
  const double factor = 1.0 + std::sqrt(n * lambda * (1.0 - lambda));
  r.rhs = factor * cp.value;
  r.rhs_components = {{"factor", factor}, {"chi_pot", cp.value}};
  r.diagnostics = {{"chi(erasure^n)", a}, {"chi(heralded)", b}, {"k", static_cast<double>(k)},
                   {"n", static_cast<double>(n)}, {"lambda", lambda},
                   {"restarts_used", static_cast<double>(ea.restarts_used() + eb.restarts_used())}};
  r.notes.push_back(std::string("chi_pot: ") + to_string(cp.tag) + " (" + cp.detail + ")");
  settle(r, "chi-hat of both channels (same budget)", allowance);
  return r;
}

BoundReport cor53_bound(const KrausChannel& phi, double lambda, const BoundsOptions& opts) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("cor53_bound: lambda must lie in (0, 1]");
  BoundReport r;
  r.id = "cor53";
  r.seed = opts.holevo.seed;
  r.inputs_fingerprint = channels_fingerprint({phi.name()}, lambda);
  const HolevoEstimate lhs_est = estimate_chi(erasure_channel(phi, lambda), opts.holevo);
  r.lhs = lhs_est.value;
  r.diagnostics.emplace_back("restarts_used", lhs_est.restarts_used());
  const double c = estimate_chi(phi, opts.holevo).value;
  const CorrectionTerm corr = erasure_correction(lambda, quantum_out(phi));
  r.rhs = lambda * (c + corr.value);
  r.rhs_components = {{"chi(Phi)", c}, {"correction", corr.value}, {"lambda", lambda}};
  finish(r, corr, "chi-hat(Phi)", true);
  return r;
}

PostSelected post_selected_capacity(const KrausChannel& phi, double lambda, const BoundsOptions& opts) {
  PostSelected ps;
  ps.report = cor53_bound(phi, lambda, opts);
  ps.lower = ps.report.lhs / lambda;
  ps.upper = ps.report.rhs / lambda;
  return ps;
}

BoundReport blocksize_bound(const std::vector<KrausChannel>& phis, double lambda, const std::vector<double>& f1,
                            const std::vector<double>& fpot, const BlocksizeOptions& opts) {
  const int n = static_cast<int>(phis.size());
  if (n < 1) throw InvalidArgument("blocksize_bound: no channels");
  if (f1.size() != phis.size() || fpot.size() != phis.size()) {
    throw InvalidArgument("blocksize_bound: one F1 and one Fpot value per channel");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("blocksize_bound: lambda must lie in [0, 1]");
  double s1 = 0.0;
  double gap = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    if (!(f1[i] >= 0.0) || !(fpot[i] >= f1[i])) {
      throw InvalidArgument("blocksize_bound: need Fpot >= F1 >= 0 for every channel");
    }
    s1 += f1[i];
    gap += fpot[i] - f1[i];
  }
  const double coeff = lambda * (1.0 - std::pow(1.0 - lambda, n - 1));
  const double o_coeff = lambda * lambda * (n - 1);
  BoundReport r;
  r.id = "blocksize";
  std::vector<std::string> names;
  for (const auto& p : phis) names.push_back(p.name());
  r.inputs_fingerprint = channels_fingerprint(names, lambda);
  r.rhs = lambda * s1 + coeff * gap;
  r.rhs_components = {{"additive", lambda * s1},          {"exact_coefficient", coeff},
                      {"o_coefficient", o_coeff},         {"correction_exact", coeff * gap},
                      {"correction_o", o_coeff * gap},    {"gap_sum", gap}};
  if (opts.evaluate_lhs) {
    std::vector<KrausChannel> erased;
    for (const auto& p : phis) erased.push_back(erasure_channel(p, lambda));
    const HolevoEstimate lhs_est = estimate_chi(tensor_all(erased), opts.holevo);
    r.lhs = lhs_est.value;
    r.diagnostics.emplace_back("restarts_used", lhs_est.restarts_used());
    r.lhs_provenance = Provenance::estimate;
    r.seed = opts.holevo.seed;
  } else {
    // Product-across-blocks ensembles achieve exactly lambda sum F1.
    r.lhs = lambda * s1;
    r.lhs_provenance = Provenance::declared;
  }
  settle(r, "chi-hat of the erasure product");
  return r;
}

BoundReport thm33_check(const AveragingInput& input, const std::vector<HeraldFactor>& factors,
                        const SepOptions& sep) {
  if (factors.empty()) throw InvalidArgument("thm33_check: no factors");
  std::vector<KrausChannel> parts;
  int L = std::numeric_limits<int>::max();
  for (const auto& f : factors) {
    const int n = static_cast<int>(f.phis.size());
    if (f.k < 1 || f.k > n) throw InvalidArgument("thm33_check: need 1 <= k <= n");
    L = std::min(L, n / f.k);
    parts.push_back(heralded_channel(f.phis, f.k));
  }
  const double lb = 1.0 / L;
  const KrausChannel z = tensor_all(parts);
  std::vector<int> order = input.b0;
  order.insert(order.end(), input.a.begin(), input.a.end());
  const DensityOperator reduced = reduce_ordered(input.rho, order);
  const int nb = static_cast<int>(input.b0.size());
  std::vector<int> acting(input.a.size());
  std::iota(acting.begin(), acting.end(), nb);
  const DensityOperator out = apply(z, reduced, acting);
  const int dB0 = input.rho.shape().total_of(input.b0);
  const int dOut = out.dim() / dB0;
  const DensityOperator omega = DensityOperator::trusted(SpaceShape({dB0, dOut}), out.matrix());

  const double s_b0 = subsystem_entropy(input.rho, input.b0);
  BoundReport r;
  r.id = "thm33";
  r.seed = sep.seed;
  r.inputs_fingerprint = fingerprint(input.rho);
  r.rhs_components = {{"S(B0)", s_b0}, {"lambda_bar", lb}};

  const SeparableApprox s = separable_approx(omega, {0}, {1}, sep);
  const DensityOperator sigma = assemble(s);
  r.lhs = std::abs(conditional_entropy(omega, {0}, {1}) - conditional_entropy(sigma, {0}, {1}));
  const double radius = 3.1 * dB0 * std::pow(lb * s_b0, 0.25);
  r.diagnostics = {{"distance", s.distance}, {"faithfulness_radius", radius}};
  if (s_b0 > 0.0) {
    const double x = std::pow(lb * s_b0, 0.25);
    r.diagnostics.emplace_back("statement_form", 3.1 * dB0 * x * std::log2(1.0 / (3.1 * x)));
  }
  CorrectionTerm hyp = shaped(lb, std::max(dB0, 2), 0.0, 4.0);
  r.rhs_components.emplace_back("hypothesis", hyp.hypothesis_value);
  if (!hyp.admissible) {
    mark_hypothesis_failed(r, hypothesis_text(hyp));
    return r;
  }
  r.rhs = entropy_correction(lb, s_b0, dB0);
  settle(r, "separable_approx (the inequality concerns the best separable state)");
  return r;
}

}  // namespace herald
