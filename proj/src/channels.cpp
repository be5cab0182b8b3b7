#include "herald/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace herald {

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string subset_name(const std::vector<int>& subset) {
  std::string s = "{";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(subset[i] + 1);
  }
  return s + "}";
}

void check_kraus_dims(const std::vector<Matrix>& kraus, int out, int in, const std::string& who) {
  for (const auto& k : kraus) {
    if (k.rows() != out || k.cols() != in) {
      throw InvalidArgument(who + ": Kraus operator is " + std::to_string(k.rows()) + "x" +
                            std::to_string(k.cols()) + ", expected " + std::to_string(out) + "x" +
                            std::to_string(in));
    }
  }
}

Matrix kraus_gram(const std::vector<Matrix>& kraus, int in) {
  Matrix s = Matrix::Zero(in, in);
  for (const auto& k : kraus) s.noalias() += k.adjoint() * k;
  return s;
}

// Kraus operators of the tensor product of per-position families.
std::vector<Matrix> kron_families(const std::vector<const std::vector<Matrix>*>& families) {
  std::vector<Matrix> current{Matrix::Identity(1, 1)};
  for (const auto* fam : families) {
    std::vector<Matrix> next;
    next.reserve(current.size() * fam->size());
    for (const auto& a : current) {
      for (const auto& b : *fam) next.push_back(kron(a, b));
    }
    current = std::move(next);
  }
  return current;
}

void guard_output(long dim, const std::string& who) {
  if (dim > kMaxOutputDim) {
    throw GuardExceeded(who + ": output dimension " + std::to_string(dim) + " exceeds " +
                        std::to_string(kMaxOutputDim));
  }
}

std::vector<Matrix> maybe_minimize(std::vector<Matrix> kraus, int in, int out) {
  if (static_cast<long>(kraus.size()) > static_cast<long>(in) * out) return minimal_kraus(kraus, in, out);
  return kraus;
}

KrausChannel switch_impl(const std::vector<KrausChannel>& phis, const std::vector<KrausChannel>& psis, int k,
                         int min_k, const std::string& name) {
  const int n = static_cast<int>(phis.size());
  if (n < 1) throw InvalidArgument(name + ": empty channel list");
  if (static_cast<int>(psis.size()) != n) throw InvalidArgument(name + ": phi and psi lists differ in length");
  if (k < min_k || k > n) throw InvalidArgument(name + ": k=" + std::to_string(k) + " out of range");
  std::vector<int> in_dims;
  std::vector<int> out_dims;
  for (int j = 0; j < n; ++j) {
    const auto& phi = phis[static_cast<std::size_t>(j)];
    const auto& psi = psis[static_cast<std::size_t>(j)];
    if (phi.is_flagged() || psi.is_flagged()) throw InvalidArgument(name + ": constituent channels must be unflagged");
    if (phi.in_dim() != psi.in_dim() || phi.out_dim() != psi.out_dim()) {
      throw InvalidArgument(name + ": shape mismatch at position " + std::to_string(j + 1));
    }
    in_dims.insert(in_dims.end(), phi.in_shape().dims().begin(), phi.in_shape().dims().end());
    out_dims.insert(out_dims.end(), phi.out_shape().dims().begin(), phi.out_shape().dims().end());
  }
  SpaceShape in(in_dims);
  SpaceShape qout(out_dims);
  auto subsets = k_subsets(n, k);
  guard_output(static_cast<long>(qout.total()) * static_cast<long>(subsets.size()), name);
  const double scale = 1.0 / std::sqrt(static_cast<double>(subsets.size()));
  std::vector<FlagSector> sectors;
  for (const auto& subset : subsets) {
    std::vector<const std::vector<Matrix>*> fams;
    for (int j = 0; j < n; ++j) {
      bool chosen = std::binary_search(subset.begin(), subset.end(), j);
      fams.push_back(chosen ? &phis[static_cast<std::size_t>(j)].kraus() : &psis[static_cast<std::size_t>(j)].kraus());
    }
    auto kraus = kron_families(fams);
    for (auto& m : kraus) m *= scale;
    kraus = maybe_minimize(std::move(kraus), in.total(), qout.total());
    sectors.push_back(FlagSector{FlagLabel{subset, n, subset_name(subset)}, std::move(kraus)});
  }
  return KrausChannel::flagged(name, in, qout, std::move(sectors));
}

std::string list_name(const std::vector<KrausChannel>& chans) {
  std::string s;
  for (std::size_t i = 0; i < chans.size(); ++i) {
    if (i) s += ",";
    s += chans[i].name();
  }
  return s;
}

DensityOperator default_sigma(const KrausChannel& phi) {
  return maximally_mixed(phi.out_shape());
}

}  // namespace

// ---- KrausChannel -----------------------------------------------------------

KrausChannel::KrausChannel(std::string name, SpaceShape in, SpaceShape out, std::vector<Matrix> kraus)
    : name_(std::move(name)), in_(in.unlabeled()), out_(out.unlabeled()), quantum_out_(out.unlabeled()) {
  if (kraus.empty()) throw InvalidArgument(name_ + ": empty Kraus family");
  check_kraus_dims(kraus, out_.total(), in_.total(), name_);
  kraus_ = maybe_minimize(std::move(kraus), in_.total(), out_.total());
  if (completeness_error() > kCompletenessTol) {
    throw InvalidArgument(name_ + ": Kraus family is not trace preserving (error " +
                          fmt_num(completeness_error()) + ")");
  }
}

KrausChannel KrausChannel::flagged(std::string name, SpaceShape in, SpaceShape quantum_out,
                                   std::vector<FlagSector> sectors) {
  if (sectors.empty()) throw InvalidArgument(name + ": flagged channel needs at least one sector");
  KrausChannel ch;
  ch.name_ = std::move(name);
  ch.in_ = in.unlabeled();
  ch.quantum_out_ = quantum_out.unlabeled();
  ch.out_ = ch.quantum_out_.concat(SpaceShape({static_cast<int>(sectors.size())}));
  ch.positions_ = sectors.front().label.positions;
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    auto& s = sectors[i];
    if (s.label.positions != ch.positions_) throw InvalidArgument(ch.name_ + ": inconsistent flag label positions");
    for (std::size_t j = 0; j < i; ++j) {
      if (sectors[j].label == s.label) throw InvalidArgument(ch.name_ + ": duplicate flag label " + s.label.name);
    }
    if (s.kraus.empty()) s.kraus.push_back(Matrix::Zero(ch.quantum_out_.total(), ch.in_.total()));
    check_kraus_dims(s.kraus, ch.quantum_out_.total(), ch.in_.total(), ch.name_);
  }
  ch.sectors_ = std::move(sectors);
  ch.build_full_kraus();
  if (ch.completeness_error() > kCompletenessTol) {
    throw InvalidArgument(ch.name_ + ": Kraus family is not trace preserving (error " +
                          fmt_num(ch.completeness_error()) + ")");
  }
  return ch;
}

void KrausChannel::build_full_kraus() {
  kraus_.clear();
  const int q = quantum_out_.total();
  const int f = flag_dim();
  for (int s = 0; s < f; ++s) {
    for (const auto& k : sectors_[static_cast<std::size_t>(s)].kraus) {
      Matrix full = Matrix::Zero(static_cast<long>(q) * f, in_.total());
      for (int r = 0; r < q; ++r) full.row(static_cast<long>(r) * f + s) = k.row(r);
      kraus_.push_back(std::move(full));
    }
  }
}

double KrausChannel::completeness_error() const {
  const int in = in_.total();
  Matrix s = Matrix::Zero(in, in);
  if (is_flagged()) {
    for (const auto& sec : sectors_) s += kraus_gram(sec.kraus, in);
  } else {
    s = kraus_gram(kraus_, in);
  }
  return max_abs(s - Matrix::Identity(in, in));
}

std::vector<Matrix> KrausChannel::apply_sectors(const Matrix& rho) const {
  if (!is_flagged()) return {apply_matrix(rho)};
  std::vector<Matrix> out;
  out.reserve(sectors_.size());
  for (const auto& sec : sectors_) {
    Matrix acc = Matrix::Zero(quantum_out_.total(), quantum_out_.total());
    for (const auto& k : sec.kraus) acc.noalias() += k * rho * k.adjoint();
    out.push_back(std::move(acc));
  }
  return out;
}

Matrix KrausChannel::apply_matrix(const Matrix& rho) const {
  if (rho.rows() != in_.total() || rho.cols() != in_.total()) {
    throw InvalidArgument(name_ + ": input dimension mismatch");
  }
  if (is_flagged()) {
    auto blocks = apply_sectors(rho);
    const int q = quantum_out_.total();
    const int f = flag_dim();
    Matrix out = Matrix::Zero(static_cast<long>(q) * f, static_cast<long>(q) * f);
    for (int s = 0; s < f; ++s) {
      const auto& b = blocks[static_cast<std::size_t>(s)];
      for (int r = 0; r < q; ++r) {
        for (int c = 0; c < q; ++c) out(static_cast<long>(r) * f + s, static_cast<long>(c) * f + s) = b(r, c);
      }
    }
    return out;
  }
  Matrix out = Matrix::Zero(out_.total(), out_.total());
  for (const auto& k : kraus_) out.noalias() += k * rho * k.adjoint();
  return out;
}

KrausChannel KrausChannel::with_name(std::string name) const {
  KrausChannel c = *this;
  c.name_ = std::move(name);
  return c;
}

// ---- application --------------------------------------------------------------

DensityOperator apply(const KrausChannel& channel, const DensityOperator& rho) {
  std::vector<int> all(static_cast<std::size_t>(rho.shape().size()));
  std::iota(all.begin(), all.end(), 0);
  return apply(channel, rho, all);
}

DensityOperator apply(const KrausChannel& channel, const DensityOperator& rho, std::vector<int> acting_on) {
  const auto& shape = rho.shape();
  const int n = shape.size();
  if (acting_on.empty()) throw InvalidArgument("apply: empty acting_on");
  for (int a : acting_on) {
    if (a < 0 || a >= n) throw InvalidArgument("apply: subsystem index out of range");
  }
  if (shape.total_of(acting_on) != channel.in_dim()) {
    throw InvalidArgument("apply: acting factors have dimension " + std::to_string(shape.total_of(acting_on)) +
                          ", channel expects " + std::to_string(channel.in_dim()));
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (std::find(acting_on.begin(), acting_on.end(), i) == acting_on.end()) rest.push_back(i);
  }
  const int first = *std::min_element(acting_on.begin(), acting_on.end());
  const auto& out_dims = channel.out_shape().dims();

  if (rest.empty() && std::is_sorted(acting_on.begin(), acting_on.end())) {
    return DensityOperator::trusted(channel.out_shape(), channel.apply_matrix(rho.matrix()));
  }

  std::vector<int> perm = rest;
  perm.insert(perm.end(), acting_on.begin(), acting_on.end());
  Matrix moved = permute_factors(rho.matrix(), shape.dims(), perm);
  const long r_dim = shape.total_of(rest);
  const long a_dim = channel.in_dim();
  const long o_dim = channel.out_dim();
  Matrix out = Matrix::Zero(r_dim * o_dim, r_dim * o_dim);
  for (long r = 0; r < r_dim; ++r) {
    for (long c = 0; c < r_dim; ++c) {
      Matrix block = moved.block(r * a_dim, c * a_dim, a_dim, a_dim);
      out.block(r * o_dim, c * o_dim, o_dim, o_dim) = channel.apply_matrix(block);
    }
  }
  // Current order: [rest..., out...]; target places out factors where the
  // first acted-on factor was.
  const int nr = static_cast<int>(rest.size());
  const int no = static_cast<int>(out_dims.size());
  int before = 0;
  for (int r : rest) {
    if (r < first) ++before;
  }
  std::vector<int> cur_dims;
  for (int r : rest) cur_dims.push_back(shape.dim(r));
  cur_dims.insert(cur_dims.end(), out_dims.begin(), out_dims.end());
  std::vector<int> target;
  for (int i = 0; i < before; ++i) target.push_back(i);
  for (int i = 0; i < no; ++i) target.push_back(nr + i);
  for (int i = before; i < nr; ++i) target.push_back(i);
  Matrix final_m = permute_factors(out, cur_dims, target);
  std::vector<int> final_dims;
  for (int t : target) final_dims.push_back(cur_dims[static_cast<std::size_t>(t)]);
  return DensityOperator::trusted(SpaceShape(final_dims), std::move(final_m));
}

std::vector<Matrix> minimal_kraus(const std::vector<Matrix>& kraus, int in_dim, int out_dim) {
  const long n = static_cast<long>(in_dim) * out_dim;
  Matrix j = Matrix::Zero(n, n);
  for (const auto& k : kraus) {
    Eigen::Map<const Vector> v(k.data(), n);  // column-major: index i*out + o
    j.noalias() += v * v.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  std::vector<Matrix> out;
  for (long i = n - 1; i >= 0; --i) {
    double mu = es.eigenvalues()(i);
    if (mu <= top * 1e-15 || mu <= 0.0) break;
    Vector w = es.eigenvectors().col(i) * std::sqrt(mu);
    out.push_back(Eigen::Map<Matrix>(w.data(), out_dim, in_dim));
  }
  if (out.empty()) out.push_back(Matrix::Zero(out_dim, in_dim));
  return out;
}

// ---- constructors -----------------------------------------------------------

KrausChannel identity_channel(int d) {
  if (d < 1) throw InvalidArgument("identity_channel: d must be >= 1");
  return KrausChannel("identity(" + std::to_string(d) + ")", SpaceShape({d}), SpaceShape({d}),
                      {Matrix::Identity(d, d)});
}

KrausChannel depolarizing_channel(int d, double p) {
  if (d < 2) throw InvalidArgument("depolarizing_channel: d must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("depolarizing_channel: p outside [0,1]");
  const double pi = std::acos(-1.0);
  Matrix x = Matrix::Zero(d, d);
  Matrix z = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    x((j + 1) % d, j) = 1.0;
    z(j, j) = std::polar(1.0, 2.0 * pi * j / d);
  }
  std::vector<Matrix> kraus;
  const double d2 = static_cast<double>(d) * d;
  Matrix xa = Matrix::Identity(d, d);
  for (int a = 0; a < d; ++a) {
    Matrix zb = Matrix::Identity(d, d);
    for (int b = 0; b < d; ++b) {
      double w = (a == 0 && b == 0) ? 1.0 - p + p / d2 : p / d2;
      if (w > 0.0) kraus.push_back(std::sqrt(w) * xa * zb);
      zb = zb * z;
    }
    xa = xa * x;
  }
  return KrausChannel("depolarizing(" + std::to_string(d) + "," + fmt_num(p) + ")", SpaceShape({d}),
                      SpaceShape({d}), std::move(kraus));
}

KrausChannel dephasing_channel(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("dephasing_channel: p outside [0,1]");
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  std::vector<Matrix> kraus{std::sqrt(1.0 - p) * Matrix::Identity(2, 2)};
  if (p > 0.0) kraus.push_back(std::sqrt(p) * z);
  return KrausChannel("dephasing(" + fmt_num(p) + ")", SpaceShape({2}), SpaceShape({2}), std::move(kraus));
}

KrausChannel trivial_channel(const DensityOperator& sigma, const SpaceShape& in) {
  auto eig = eig_hermitian(sigma.matrix());
  const int din = in.total();
  const int dout = sigma.dim();
  std::vector<Matrix> kraus;
  for (int j = 0; j < dout; ++j) {
    double lam = eig.values(j);
    if (lam <= 1e-15) continue;
    for (int i = 0; i < din; ++i) {
      Matrix k = Matrix::Zero(dout, din);
      k.col(i) = std::sqrt(lam) * eig.vectors.col(j);
      kraus.push_back(std::move(k));
    }
  }
  return KrausChannel("trivial(" + std::to_string(din) + "->" + std::to_string(dout) + ")", in, sigma.shape(),
                      std::move(kraus));
}

KrausChannel trivial_channel(int d) {
  SpaceShape s({d});
  return trivial_channel(maximally_mixed(s), s).with_name("trivial(" + std::to_string(d) + ")");
}

KrausChannel erasure_channel(const KrausChannel& phi, double lambda, const std::optional<DensityOperator>& sigma) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("erasure_channel: lambda outside [0,1]");
  if (phi.is_flagged()) throw InvalidArgument("erasure_channel: inner channel must be unflagged");
  DensityOperator s = sigma ? *sigma : default_sigma(phi);
  if (s.dim() != phi.out_dim()) throw InvalidArgument("erasure_channel: sigma does not live on the output space");
  KrausChannel theta = trivial_channel(s, phi.in_shape());
  std::vector<Matrix> success;
  for (const auto& k : phi.kraus()) success.push_back(std::sqrt(lambda) * k);
  std::vector<Matrix> failure;
  for (const auto& k : theta.kraus()) failure.push_back(std::sqrt(1.0 - lambda) * k);
  std::vector<FlagSector> sectors{
      FlagSector{FlagLabel{{0}, 1, "success"}, std::move(success)},
      FlagSector{FlagLabel{{}, 1, "failure"}, std::move(failure)},
  };
  return KrausChannel::flagged("erasure(" + phi.name() + "," + fmt_num(lambda) + ")", phi.in_shape(),
                               phi.out_shape(), std::move(sectors));
}

KrausChannel heralded_channel(const std::vector<KrausChannel>& phis, int k, const std::optional<DensityOperator>& sigma) {
  if (phis.empty()) throw InvalidArgument("heralded_channel: empty channel list");
  DensityOperator s = sigma ? *sigma : default_sigma(phis.front());
  std::vector<KrausChannel> thetas;
  for (const auto& phi : phis) {
    if (phi.out_dim() != s.dim()) throw InvalidArgument("heralded_channel: output dimension incompatible with sigma");
    thetas.push_back(trivial_channel(s, phi.in_shape()));
  }
  return switch_impl(phis, thetas, k, 1, "heralded(" + std::to_string(k) + ";" + list_name(phis) + ")");
}

KrausChannel flagged_switch_channel(const std::vector<KrausChannel>& phis, const std::vector<KrausChannel>& psis,
                                    int k) {
  return switch_impl(phis, psis, k, 1,
                     "switch(" + std::to_string(k) + ";" + list_name(phis) + ";" + list_name(psis) + ")");
}

KrausChannel heralded_power(const KrausChannel& phi, int n, int k, const std::optional<DensityOperator>& sigma) {
  if (n < 1) throw InvalidArgument("heralded_power: n must be >= 1");
  DensityOperator s = sigma ? *sigma : default_sigma(phi);
  if (phi.out_dim() != s.dim()) throw InvalidArgument("heralded_power: output dimension incompatible with sigma");
  std::vector<KrausChannel> phis(static_cast<std::size_t>(n), phi);
  std::vector<KrausChannel> thetas(static_cast<std::size_t>(n), trivial_channel(s, phi.in_shape()));
  return switch_impl(phis, thetas, k, 0,
                     "heralded(" + std::to_string(k) + "/" + std::to_string(n) + ";" + phi.name() + ")");
}

KrausChannel tensor(const KrausChannel& phi, const KrausChannel& psi) {
  SpaceShape in = phi.in_shape().concat(psi.in_shape());
  SpaceShape qout = phi.quantum_out_shape().concat(psi.quantum_out_shape());
  const std::string name = phi.name() + "*" + psi.name();
  if (!phi.is_flagged() && !psi.is_flagged()) {
    guard_output(qout.total(), "tensor");
    auto kraus = kron_families({&phi.kraus(), &psi.kraus()});
    return KrausChannel(name, in, qout, std::move(kraus));
  }
  auto as_sectors = [](const KrausChannel& c) {
    if (c.is_flagged()) return c.sectors();
    return std::vector<FlagSector>{FlagSector{FlagLabel{{}, 0, ""}, c.kraus()}};
  };
  auto s1 = as_sectors(phi);
  auto s2 = as_sectors(psi);
  guard_output(static_cast<long>(qout.total()) * static_cast<long>(s1.size() * s2.size()), "tensor");
  const int p1 = phi.positions();
  std::vector<FlagSector> sectors;
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      FlagLabel label;
      label.subset = a.label.subset;
      for (int x : b.label.subset) label.subset.push_back(x + p1);
      label.positions = a.label.positions + b.label.positions;
      if (a.label.name.empty()) {
        label.name = b.label.name;
      } else if (b.label.name.empty()) {
        label.name = a.label.name;
      } else {
        label.name = a.label.name + "|" + b.label.name;
      }
      auto kraus = maybe_minimize(kron_families({&a.kraus, &b.kraus}), in.total(), qout.total());
      sectors.push_back(FlagSector{std::move(label), std::move(kraus)});
    }
  }
  return KrausChannel::flagged(name, in, qout, std::move(sectors));
}

KrausChannel tensor_all(const std::vector<KrausChannel>& channels) {
  if (channels.empty()) throw InvalidArgument("tensor_all: empty list");
  KrausChannel out = channels.front();
  for (std::size_t i = 1; i < channels.size(); ++i) out = tensor(out, channels[i]);
  return out;
}

KrausChannel tensor_power(const KrausChannel& phi, int n) {
  if (n < 1) throw InvalidArgument("tensor_power: n must be >= 1");
  long total = 1;
  for (int i = 0; i < n; ++i) {
    total *= phi.out_dim();
    guard_output(total, "tensor_power");
  }
  return tensor_all(std::vector<KrausChannel>(static_cast<std::size_t>(n), phi));
}

KrausChannel mix_flagged(const std::vector<KrausChannel>& channels, std::span<const double> weights, std::string name) {
  if (channels.empty() || channels.size() != weights.size()) {
    throw InvalidArgument("mix_flagged: need one weight per channel");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidArgument("mix_flagged: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mix_flagged: weights do not sum to 1");
  const auto& first = channels.front();
  std::vector<FlagSector> sectors;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& c = channels[i];
    if (!c.is_flagged()) throw InvalidArgument("mix_flagged: channels must be flagged");
    if (c.in_dim() != first.in_dim() || c.quantum_out_dim() != first.quantum_out_dim()) {
      throw InvalidArgument("mix_flagged: shape mismatch");
    }
    for (const auto& s : c.sectors()) {
      FlagSector scaled{s.label, {}};
      for (const auto& k : s.kraus) scaled.kraus.push_back(std::sqrt(weights[i]) * k);
      sectors.push_back(std::move(scaled));
    }
  }
  return KrausChannel::flagged(std::move(name), first.in_shape(), first.quantum_out_shape(), std::move(sectors));
}

KrausChannel reorder_sectors(const KrausChannel& channel, const std::vector<FlagLabel>& labels) {
  if (!channel.is_flagged() || static_cast<int>(labels.size()) != channel.flag_dim()) {
    throw InvalidArgument("reorder_sectors: label set does not match channel");
  }
  std::vector<FlagSector> sectors;
  for (const auto& l : labels) {
    auto it = std::find_if(channel.sectors().begin(), channel.sectors().end(),
                           [&](const FlagSector& s) { return s.label == l; });
    if (it == channel.sectors().end()) throw InvalidArgument("reorder_sectors: label " + l.name + " not present");
    FlagSector s = *it;
    s.label.name = l.name;
    sectors.push_back(std::move(s));
  }
  return KrausChannel::flagged(channel.name(), channel.in_shape(), channel.quantum_out_shape(), std::move(sectors));
}

DensityOperator choi_matrix(const KrausChannel& phi) {
  const long din = phi.in_dim();
  const long dout = phi.out_dim();
  const long n = din * dout;
  Matrix j = Matrix::Zero(n, n);
  for (const auto& k : phi.kraus()) {
    // Column-major storage of K is exactly sum_i |i> (x) K|i>.
    Eigen::Map<const Vector> v(k.data(), n);
    j.noalias() += v * v.adjoint();
  }
  j /= static_cast<double>(din);
  return DensityOperator::trusted(phi.in_shape().concat(phi.out_shape()), std::move(j));
}

double choi_distance(const KrausChannel& phi, const KrausChannel& psi) {
  if (phi.in_dim() != psi.in_dim() || phi.out_dim() != psi.out_dim()) {
    throw InvalidArgument("choi_distance: channels have different shapes");
  }
  return trace_norm(choi_matrix(phi).matrix() - choi_matrix(psi).matrix());
}

bool channels_equal(const KrausChannel& phi, const KrausChannel& psi, double tol) {
  return choi_distance(phi, psi) <= tol;
}

std::vector<double> binomial_weights(int n, double lambda) {
  std::vector<double> w;
  for (int k = 0; k <= n; ++k) w.push_back(binomial(n, k) * std::pow(lambda, k) * std::pow(1.0 - lambda, n - k));
  return w;
}

KrausChannel binomial_mixture_channel(const std::vector<KrausChannel>& phis, std::span<const double> weights,
                                      const std::optional<DensityOperator>& sigma) {
  const int n = static_cast<int>(phis.size());
  if (n < 1) throw InvalidArgument("binomial_mixture_channel: empty channel list");
  if (static_cast<int>(weights.size()) != n + 1) throw InvalidArgument("binomial_mixture_channel: need n+1 weights");
  DensityOperator s = sigma ? *sigma : default_sigma(phis.front());
  std::vector<KrausChannel> thetas;
  for (const auto& phi : phis) thetas.push_back(trivial_channel(s, phi.in_shape()));
  std::vector<KrausChannel> parts;
  for (int k = 0; k <= n; ++k) parts.push_back(switch_impl(phis, thetas, k, 0, "heralded"));
  KrausChannel mixed = mix_flagged(parts, weights, "binomial-mixture(" + list_name(phis) + ")");

  // Merged erasure register order: position 1 most significant, success first.
  std::vector<FlagLabel> order;
  for (int code = 0; code < (1 << n); ++code) {
    FlagLabel l;
    l.positions = n;
    for (int j = 0; j < n; ++j) {
      bool failed = (code >> (n - 1 - j)) & 1;
      if (!failed) l.subset.push_back(j);
      l.name += failed ? (j ? "|failure" : "failure") : (j ? "|success" : "success");
    }
    order.push_back(std::move(l));
  }
  return reorder_sectors(mixed, order);
}

BoundReport binomial_mixture_check(const std::vector<KrausChannel>& phis, double lambda,
                                   const std::optional<DensityOperator>& sigma) {
  const int n = static_cast<int>(phis.size());
  if (n > 3) throw GuardExceeded("binomial_mixture_check: n=" + std::to_string(n) + " exceeds 3");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("binomial_mixture_check: lambda outside [0,1]");
  DensityOperator s = sigma ? *sigma : default_sigma(phis.front());
  std::vector<KrausChannel> erasures;
  for (const auto& phi : phis) erasures.push_back(erasure_channel(phi, lambda, s));
  KrausChannel product = tensor_all(erasures);
  KrausChannel mixture = binomial_mixture_channel(phis, binomial_weights(n, lambda), s);
  BoundReport r;
  r.id = "binomial-mixture";
  r.lhs = choi_distance(product, mixture);
  r.lhs_provenance = Provenance::analytic;
  r.rhs = 1e-10;
  r.rhs_components = {{"tolerance", 1e-10}};
  r.slack = r.rhs - r.lhs;
  r.verdict = r.slack >= 0.0 ? Verdict::pass : Verdict::inconclusive;
  if (!r.passed()) r.reason = "Choi distance above tolerance";
  r.diagnostics = {{"n", n}, {"lambda", lambda}};
  return r;
}

std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j) - 1] + 1;
  }
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace herald
