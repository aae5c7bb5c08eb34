#pragma once

#include "ifsm/coeff_vector.hpp"
#include "ifsm/filterbank.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ifsm {

inline constexpr std::uint64_t kDefaultNodeCap = 10'000'000;

/// N^k, or nullopt if it does not fit in 63 bits.
std::optional<std::uint64_t> checked_power(int base, int exponent);

/// The N-adic point x_k(a) = a_1/N + ... + a_k/N^k, held exactly as
/// numerator / N^k with numerator = sum a_i N^{k-i}.
struct NAdicAddress {
  int base = 2;
  int depth = 0;
  std::uint64_t numerator = 0;

  static NAdicAddress from_digits(int base, std::span<const int> digits);
  std::vector<int> digits() const;
  double value() const;

  /// a_1..a_k, d
  NAdicAddress child(int d) const;
  /// j, a_1..a_k: the image under x -> (x + j)/N
  NAdicAddress prepend(int j) const;

  auto operator<=>(const NAdicAddress&) const = default;
};

struct Atom {
  std::uint64_t numerator = 0;
  double mass = 0.0;
};

/// sum_a mass_a * delta_{x_k(a)}; atoms sorted by numerator, zero masses
/// omitted.
struct AtomicMeasure {
  int base = 2;
  int depth = 0;
  std::vector<Atom> atoms;
  /// mass discarded by pruning (0 unless prune_eps > 0)
  double pruned_mass = 0.0;

  double total_mass() const;
  /// 0 when there is no atom at this address
  double mass_at(std::uint64_t numerator) const;
  double position(const Atom& a) const;
  NAdicAddress address(const Atom& a) const { return {base, depth, a.numerator}; }
};

/// sum of |mass difference| over the union of addresses
double total_variation(const AtomicMeasure& a, const AtomicMeasure& b);

struct AtomTreeOptions {
  /// subtrees whose root mass is <= prune_eps are skipped
  double prune_eps = 0.0;
  std::uint64_t node_cap = kDefaultNodeCap;
};

/// mu_f^(k): masses |S_a^* f|^2 at x_k(a), with S_a^* = S_{a_k}^* ... S_{a_1}^*,
/// enumerated depth first in ascending digit order.
AtomicMeasure atom_tree(const FilterBank& fb, const CoeffVector& f, int k,
                        const AtomTreeOptions& options = {});

/// Atom tree that keeps the residual vectors S_a^* f of its leaves so it
/// can be refined one level at a time.
class AtomTree {
public:
  struct Leaf {
    std::uint64_t numerator = 0;
    CoeffVector residual;
    double mass = 0.0;
  };

  AtomTree(FilterBank fb, const CoeffVector& f, int k, AtomTreeOptions options = {});

  int depth() const { return depth_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }
  AtomicMeasure measure() const;

  /// Splits every leaf into its N children and returns the new measure.
  AtomicMeasure refine();

private:
  FilterBank fb_;
  AtomTreeOptions options_;
  int depth_ = 0;
  double pruned_mass_ = 0.0;
  std::vector<Leaf> leaves_;
};

/// sum_atoms mass * exp(i t x) for each t.
std::vector<Complex> fourier_of_atoms(const AtomicMeasure& mu, std::span<const double> ts);

/// Certified bound |t| N^{-k} on |mu_f^(t) - mu_f^(k)^(t)| for unit f.
double fourier_error_bound(double t, int k, int n);

/// Transform of mu_f^(k) without enumerating atoms: the quadratic form
/// f^* Q_k(t) f with Q_0 = I and Q_l(s) = sum_j exp(ijs/N) A_j^* Q_{l-1}(s/N) A_j,
/// A_j the adjoints restricted to an invariant window around supp f.
std::vector<Complex> fourier_by_transfer(const FilterBank& fb, const CoeffVector& f, int k,
                                         std::span<const double> ts);

/// F^(k)(x) = mu([0, x]); xs must be ascending; F = 0 for x < 0.
std::vector<double> cdf(const AtomicMeasure& mu, std::span<const double> xs);

struct IntegrationResult {
  Complex value = 0.0;
  /// N^{-k} * int |t psihat(t)| dt when that moment was supplied
  std::optional<double> bound;
};

IntegrationResult integrate(const AtomicMeasure& mu, const std::function<Complex(double)>& psi,
                            std::optional<double> l1_fourier_moment = std::nullopt);

/// Total variation between mu_f^(k) and sum_j (mu_{S_j^* f}^(k-1) pushed
/// through x -> (x + j)/N). Requires k >= 1.
double refinement_residual(const FilterBank& fb, const CoeffVector& f, int k,
                           const AtomTreeOptions& options = {});

/// S_a S_a^* f, the cylinder projection of f onto A_k(a).
CoeffVector cylinder_component(const FilterBank& fb, const CoeffVector& f, const NAdicAddress& a);

/// Gram matrix of {S_a S_a^* f} over all N^k addresses in numerator order.
Eigen::MatrixXcd cylinder_gram(const FilterBank& fb, const CoeffVector& f, int k);

} // namespace ifsm
