#include "ifsm/nadic_measure.hpp"

#include "ifsm/cuntz.hpp"
#include "ifsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ifsm {

std::optional<std::uint64_t> checked_power(int base, int exponent) {
  if (base < 1 || exponent < 0)
    return std::nullopt;
  constexpr std::uint64_t limit = std::uint64_t{1} << 63;
  std::uint64_t p = 1;
  for (int i = 0; i < exponent; ++i) {
    if (p > limit / static_cast<std::uint64_t>(base))
      return std::nullopt;
    p *= static_cast<std::uint64_t>(base);
  }
  return p;
}

NAdicAddress NAdicAddress::from_digits(int base, std::span<const int> digits) {
  NAdicAddress a{base, 0, 0};
  for (int d : digits)
    a = a.child(d);
  return a;
}

std::vector<int> NAdicAddress::digits() const {
  std::vector<int> out(depth);
  std::uint64_t v = numerator;
  for (int i = depth - 1; i >= 0; --i) {
    out[i] = static_cast<int>(v % base);
    v /= base;
  }
  return out;
}

double NAdicAddress::value() const {
  return static_cast<double>(numerator) / std::pow(static_cast<double>(base), depth);
}

NAdicAddress NAdicAddress::child(int d) const {
  if (d < 0 || d >= base)
    throw ChannelOutOfRange("digit " + std::to_string(d) + " outside base " + std::to_string(base));
  if (!checked_power(base, depth + 1))
    throw DepthOverflow("address depth " + std::to_string(depth + 1) + " overflows 63 bits");
  return {base, depth + 1, numerator * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(d)};
}

NAdicAddress NAdicAddress::prepend(int j) const {
  if (j < 0 || j >= base)
    throw ChannelOutOfRange("digit " + std::to_string(j) + " outside base " + std::to_string(base));
  const auto scale = checked_power(base, depth);
  if (!scale || !checked_power(base, depth + 1))
    throw DepthOverflow("address depth " + std::to_string(depth + 1) + " overflows 63 bits");
  return {base, depth + 1, static_cast<std::uint64_t>(j) * *scale + numerator};
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms)
    s += a.mass;
  return s;
}

double AtomicMeasure::mass_at(std::uint64_t numerator) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), numerator,
                             [](const Atom& a, std::uint64_t n) { return a.numerator < n; });
  return it != atoms.end() && it->numerator == numerator ? it->mass : 0.0;
}

double AtomicMeasure::position(const Atom& a) const { return address(a).value(); }

double total_variation(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.base != b.base || a.depth != b.depth)
    throw DepthMismatch("total_variation: measures on different partitions");
  double tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    if (j == b.atoms.size() || (i < a.atoms.size() && a.atoms[i].numerator < b.atoms[j].numerator)) {
      tv += a.atoms[i++].mass;
    } else if (i == a.atoms.size() || b.atoms[j].numerator < a.atoms[i].numerator) {
      tv += b.atoms[j++].mass;
    } else {
      tv += std::abs(a.atoms[i++].mass - b.atoms[j++].mass);
    }
  }
  return tv;
}

namespace {

void check_capacity(int n, int k, const AtomTreeOptions& options) {
  if (k < 0)
    throw std::invalid_argument("atom tree depth must be >= 0");
  if (!(options.prune_eps >= 0.0 && options.prune_eps < 1.0))
    throw std::invalid_argument("prune_eps must lie in [0, 1)");
  const auto leaves = checked_power(n, k);
  if (!leaves)
    throw DepthOverflow(std::to_string(n) + "^" + std::to_string(k) + " does not fit in 63 bits");
  if (options.prune_eps == 0.0 && *leaves > options.node_cap)
    throw DepthOverflow(std::to_string(n) + "^" + std::to_string(k) + " = " + std::to_string(*leaves) +
                        " exceeds the node cap " + std::to_string(options.node_cap));
}

class Enumerator {
public:
  Enumerator(const FilterBank& fb, int k, const AtomTreeOptions& options, AtomicMeasure& out)
      : fb_(fb), k_(k), options_(options), out_(out) {}

  void visit(const CoeffVector& residual, std::uint64_t numerator, int level) {
    if (++nodes_ > options_.node_cap && options_.prune_eps > 0.0)
      throw DepthOverflow("atom tree visited more than " + std::to_string(options_.node_cap) + " nodes");
    const double mass = residual.squared_norm();
    if (mass <= options_.prune_eps) {
      out_.pruned_mass += mass;
      return;
    }
    if (level == k_) {
      out_.atoms.push_back({numerator, mass});
      return;
    }
    const auto n = static_cast<std::uint64_t>(fb_.n_channels);
    for (int d = 0; d < fb_.n_channels; ++d)
      visit(apply_s_star(fb_, d, residual), numerator * n + static_cast<std::uint64_t>(d), level + 1);
  }

private:
  const FilterBank& fb_;
  int k_;
  const AtomTreeOptions& options_;
  AtomicMeasure& out_;
  std::uint64_t nodes_ = 0;
};

} // namespace

AtomicMeasure atom_tree(const FilterBank& fb, const CoeffVector& f, int k, const AtomTreeOptions& options) {
  fb.check_shape();
  check_capacity(fb.n_channels, k, options);
  AtomicMeasure mu{fb.n_channels, k, {}, 0.0};
  Enumerator(fb, k, options, mu).visit(f, 0, 0);
  return mu;
}

AtomTree::AtomTree(FilterBank fb, const CoeffVector& f, int k, AtomTreeOptions options)
    : fb_(std::move(fb)), options_(options) {
  fb_.check_shape();
  check_capacity(fb_.n_channels, k, options_);
  const double root = f.squared_norm();
  if (root <= options_.prune_eps)
    pruned_mass_ = root;
  else
    leaves_.push_back({0, f, root});
  for (int level = 0; level < k; ++level)
    refine();
}

AtomicMeasure AtomTree::measure() const {
  AtomicMeasure mu{fb_.n_channels, depth_, {}, pruned_mass_};
  mu.atoms.reserve(leaves_.size());
  for (const auto& leaf : leaves_)
    mu.atoms.push_back({leaf.numerator, leaf.mass});
  return mu;
}

AtomicMeasure AtomTree::refine() {
  check_capacity(fb_.n_channels, depth_ + 1, options_);
  const auto n = static_cast<std::uint64_t>(fb_.n_channels);
  std::vector<Leaf> next;
  next.reserve(leaves_.size() * n);
  for (const auto& leaf : leaves_) {
    for (int d = 0; d < fb_.n_channels; ++d) {
      CoeffVector r = apply_s_star(fb_, d, leaf.residual);
      const double mass = r.squared_norm();
      if (mass <= options_.prune_eps) {
        pruned_mass_ += mass;
        continue;
      }
      next.push_back({leaf.numerator * n + static_cast<std::uint64_t>(d), std::move(r), mass});
    }
  }
  if (options_.prune_eps > 0.0 && next.size() > options_.node_cap)
    throw DepthOverflow("atom tree holds more than " + std::to_string(options_.node_cap) + " leaves");
  leaves_ = std::move(next);
  ++depth_;
  return measure();
}

std::vector<Complex> fourier_of_atoms(const AtomicMeasure& mu, std::span<const double> ts) {
  std::vector<Complex> out;
  out.reserve(ts.size());
  for (double t : ts) {
    Complex acc = 0.0;
    for (const auto& a : mu.atoms)
      acc += a.mass * std::polar(1.0, t * mu.position(a));
    out.push_back(acc);
  }
  return out;
}

double fourier_error_bound(double t, int k, int n) {
  if (k < 0)
    throw std::invalid_argument("fourier_error_bound: k must be >= 0");
  return std::abs(t) * std::pow(static_cast<double>(n), -k);
}

std::vector<Complex> fourier_by_transfer(const FilterBank& fb, const CoeffVector& f, int k,
                                         std::span<const double> ts) {
  fb.check_shape();
  if (k < 0)
    throw std::invalid_argument("fourier_by_transfer: k must be >= 0");
  const int n = fb.n_channels;
  std::vector<Complex> out;
  if (f.empty()) {
    out.assign(ts.size(), 0.0);
    return out;
  }
  const std::int64_t reach = std::max(std::abs(fb.min_degree()), std::abs(fb.max_degree()));
  const std::int64_t r = (reach + n - 2) / (n - 1);
  const IndexRange window{std::min(f.first(), -r), std::max(f.last(), r)};

  std::vector<Eigen::MatrixXcd> ops;
  for (int j = 0; j < n; ++j)
    ops.push_back(restricted_adjoint(fb, j, window));
  const Eigen::VectorXcd v = to_window(f, window);

  out.reserve(ts.size());
  for (double t : ts) {
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(window.size(), window.size());
    for (int level = 1; level <= k; ++level) {
      // q currently holds Q_{level-1} at argument t / N^{k-level+1}
      const double s = t * std::pow(static_cast<double>(n), level - k);
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(window.size(), window.size());
      for (int j = 0; j < n; ++j)
        next += std::polar(1.0, j * s / n) * (ops[j].adjoint() * q * ops[j]);
      q = std::move(next);
    }
    out.push_back(v.dot(q * v));
  }
  return out;
}

std::vector<double> cdf(const AtomicMeasure& mu, std::span<const double> xs) {
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw std::invalid_argument("cdf: evaluation points must be ascending");
  std::vector<double> out;
  out.reserve(xs.size());
  std::size_t i = 0;
  double acc = 0.0;
  for (double x : xs) {
    while (i < mu.atoms.size() && mu.position(mu.atoms[i]) <= x)
      acc += mu.atoms[i++].mass;
    out.push_back(acc);
  }
  return out;
}

IntegrationResult integrate(const AtomicMeasure& mu, const std::function<Complex(double)>& psi,
                            std::optional<double> l1_fourier_moment) {
  IntegrationResult r;
  for (const auto& a : mu.atoms)
    r.value += a.mass * psi(mu.position(a));
  if (l1_fourier_moment) {
    if (!(*l1_fourier_moment >= 0.0) || !std::isfinite(*l1_fourier_moment))
      throw std::invalid_argument("integrate: Fourier moment must be finite and >= 0");
    r.bound = std::pow(static_cast<double>(mu.base), -mu.depth) * *l1_fourier_moment;
  }
  return r;
}

double refinement_residual(const FilterBank& fb, const CoeffVector& f, int k, const AtomTreeOptions& options) {
  if (k < 1)
    throw std::invalid_argument("refinement_residual: k must be >= 1");
  const AtomicMeasure base = atom_tree(fb, f, k, options);
  AtomicMeasure pushed{fb.n_channels, k, {}, 0.0};
  for (int j = 0; j < fb.n_channels; ++j) {
    const AtomicMeasure part = atom_tree(fb, apply_s_star(fb, j, f), k - 1, options);
    for (const auto& a : part.atoms)
      pushed.atoms.push_back({part.address(a).prepend(j).numerator, a.mass});
  }
  // prepending j keeps the blocks ordered, so pushed is already sorted
  return total_variation(base, pushed);
}

CoeffVector cylinder_component(const FilterBank& fb, const CoeffVector& f, const NAdicAddress& a) {
  const auto digits = a.digits();
  CoeffVector g = f;
  for (int d : digits)
    g = apply_s_star(fb, d, g);
  for (auto it = digits.rbegin(); it != digits.rend(); ++it)
    g = apply_s(fb, *it, g);
  return g;
}

Eigen::MatrixXcd cylinder_gram(const FilterBank& fb, const CoeffVector& f, int k) {
  fb.check_shape();
  const auto count = checked_power(fb.n_channels, k);
  if (!count || *count > 4096)
    throw DepthOverflow("cylinder_gram limited to 4096 cylinders");
  std::vector<CoeffVector> g;
  for (std::uint64_t i = 0; i < *count; ++i)
    g.push_back(cylinder_component(fb, f, {fb.n_channels, k, i}));
  const auto m = static_cast<Eigen::Index>(*count);
  Eigen::MatrixXcd gram(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      gram(r, c) = g[r].dot(g[c]);
  return gram;
}

} // namespace ifsm
