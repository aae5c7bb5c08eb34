#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ifsm {

/// x -> a x + b
struct AffineMap {
  double a = 0.0;
  double b = 0.0;
  double operator()(double x) const { return a * x + b; }
  double fixed_point() const { return b / (1.0 - a); }
};

/// Contractive affine maps on R with probability weights.
struct AffineIFS {
  std::vector<AffineMap> maps;
  std::vector<double> weights;

  /// Throws std::invalid_argument unless the sizes agree, every |a| < 1,
  /// every weight is >= 0 and they sum to 1 within 1e-12.
  void check() const;
  /// max |a_i|
  double contraction() const;
};

/// x -> (x + j)/N, j = 0..N-1, with the given weights.
AffineIFS nadic_ifs(int n, std::vector<double> weights);

struct PointMass {
  double position = 0.0;
  double mass = 0.0;
};

/// Finite atomic approximation of an IFS measure, sorted by position.
using PointMassCloud = std::vector<PointMass>;

/// Sorts by position and merges atoms closer than `merge_tol`.
PointMassCloud normalize_cloud(PointMassCloud cloud, double merge_tol = 1e-14);

/// k-th Hutchinson iterate of delta_seed: atoms sigma_{a_1} o ... o sigma_{a_k}(seed)
/// with mass p_{a_1} ... p_{a_k}; zero-weight branches are dropped.
PointMassCloud cascade(const AffineIFS& ifs, int k, double seed = 0.0,
                       std::uint64_t node_cap = 10'000'000);

/// One application of mu -> sum_i p_i mu o sigma_i^{-1}.
PointMassCloud hutchinson_step(const AffineIFS& ifs, const PointMassCloud& cloud);

struct ChaosGameResult {
  std::uint64_t samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  /// counts per equal-width bin over [hist_lo, hist_hi); empty if not requested
  std::vector<std::uint64_t> histogram;
  double hist_lo = 0.0;
  double hist_hi = 0.0;
};

struct HistogramSpec {
  int bins = 0;
  double lo = 0.0;
  double hi = 1.0;
};

/// Random iteration x <- sigma_J(x), J drawn by the weights from a
/// mt19937_64 stream seeded with rng_seed. Starts at the fixed point of
/// the first positive-weight map and discards burn_in steps.
ChaosGameResult chaos_game(const AffineIFS& ifs, std::uint64_t n_samples, std::uint64_t burn_in,
                           std::uint64_t rng_seed, std::optional<HistogramSpec> histogram = std::nullopt);

/// m_r = int x^r dmu for r = 0..max_order, from the triangular recursion
/// (1 - sum_i p_i a_i^r) m_r = sum_i p_i sum_{s<r} C(r,s) a_i^s b_i^{r-s} m_s.
std::vector<double> solve_moments(const AffineIFS& ifs, int max_order);

/// W1 distance between two clouds on R, as the integral of |F - G|.
double wasserstein1(const PointMassCloud& p, const PointMassCloud& q);

/// W1(cloud, hutchinson_step(cloud)).
double self_similarity_residual(const AffineIFS& ifs, const PointMassCloud& cloud);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Smallest interval [L, U] mapped into itself by every map (the convex
/// hull of the attractor).
Interval invariant_interval(const AffineIFS& ifs);

struct AttractorCover {
  Interval hull;
  /// sigma_{i_1} o ... o sigma_{i_k}([L, U]) in address order
  std::vector<Interval> intervals;
  double max_diameter = 0.0;
  /// c^k (U - L)
  double diameter_bound = 0.0;
  /// true when no two intervals share more than an endpoint
  bool non_overlapping = true;
};

AttractorCover attractor_cover(const AffineIFS& ifs, int k, std::uint64_t node_cap = 10'000'000);

} // namespace ifsm
