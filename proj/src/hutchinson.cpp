#include "ifsm/hutchinson.hpp"

#include "ifsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace ifsm {

void AffineIFS::check() const {
  if (maps.empty())
    throw std::invalid_argument("IFS has no maps");
  if (maps.size() != weights.size())
    throw std::invalid_argument("IFS has " + std::to_string(maps.size()) + " maps but " +
                                std::to_string(weights.size()) + " weights");
  for (const auto& m : maps)
    if (!(std::abs(m.a) < 1.0) || !std::isfinite(m.b))
      throw std::invalid_argument("IFS map is not a contraction");
  double sum = 0.0;
  for (double p : weights) {
    if (!(p >= 0.0))
      throw std::invalid_argument("IFS weights must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("IFS weights sum to " + std::to_string(sum) + ", not 1");
}

double AffineIFS::contraction() const {
  double c = 0.0;
  for (const auto& m : maps)
    c = std::max(c, std::abs(m.a));
  return c;
}

AffineIFS nadic_ifs(int n, std::vector<double> weights) {
  AffineIFS ifs;
  for (int j = 0; j < n; ++j)
    ifs.maps.push_back({1.0 / n, static_cast<double>(j) / n});
  ifs.weights = std::move(weights);
  return ifs;
}

PointMassCloud normalize_cloud(PointMassCloud cloud, double merge_tol) {
  std::stable_sort(cloud.begin(), cloud.end(),
                   [](const PointMass& x, const PointMass& y) { return x.position < y.position; });
  PointMassCloud out;
  for (const auto& p : cloud) {
    if (p.mass == 0.0)
      continue;
    if (!out.empty() && p.position - out.back().position <= merge_tol)
      out.back().mass += p.mass;
    else
      out.push_back(p);
  }
  return out;
}

PointMassCloud hutchinson_step(const AffineIFS& ifs, const PointMassCloud& cloud) {
  PointMassCloud next;
  next.reserve(cloud.size() * ifs.maps.size());
  for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
    if (ifs.weights[i] == 0.0)
      continue;
    for (const auto& p : cloud)
      next.push_back({ifs.maps[i](p.position), ifs.weights[i] * p.mass});
  }
  return normalize_cloud(std::move(next));
}

PointMassCloud cascade(const AffineIFS& ifs, int k, double seed, std::uint64_t node_cap) {
  ifs.check();
  if (k < 0)
    throw std::invalid_argument("cascade depth must be >= 0");
  std::uint64_t live = 0;
  for (double p : ifs.weights)
    live += p > 0.0 ? 1 : 0;
  PointMassCloud cloud{{seed, 1.0}};
  for (int level = 0; level < k; ++level) {
    if (cloud.size() * live > node_cap)
      throw DepthOverflow("cascade level " + std::to_string(level + 1) + " exceeds the node cap " +
                          std::to_string(node_cap));
    cloud = hutchinson_step(ifs, cloud);
  }
  return cloud;
}

ChaosGameResult chaos_game(const AffineIFS& ifs, std::uint64_t n_samples, std::uint64_t burn_in,
                           std::uint64_t rng_seed, std::optional<HistogramSpec> histogram) {
  ifs.check();
  if (n_samples == 0)
    throw std::invalid_argument("chaos_game needs at least one sample");
  if (histogram && (histogram->bins <= 0 || !(histogram->hi > histogram->lo)))
    throw std::invalid_argument("chaos_game: bad histogram spec");

  std::vector<double> cumulative(ifs.weights.size());
  std::partial_sum(ifs.weights.begin(), ifs.weights.end(), cumulative.begin());
  const auto first_live = static_cast<std::size_t>(
      std::find_if(ifs.weights.begin(), ifs.weights.end(), [](double p) { return p > 0.0; }) -
      ifs.weights.begin());

  std::mt19937_64 rng(rng_seed);
  auto pick = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto i = static_cast<std::size_t>(it - cumulative.begin());
    if (i >= cumulative.size())
      i = cumulative.size() - 1;
    // never land on a zero-weight map through rounding
    while (ifs.weights[i] == 0.0)
      i = i == 0 ? first_live : i - 1;
    return i;
  };

  double x = ifs.maps[first_live].fixed_point();
  for (std::uint64_t s = 0; s < burn_in; ++s)
    x = ifs.maps[pick()](x);

  ChaosGameResult r;
  if (histogram) {
    r.histogram.assign(histogram->bins, 0);
    r.hist_lo = histogram->lo;
    r.hist_hi = histogram->hi;
  }
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t s = 1; s <= n_samples; ++s) {
    x = ifs.maps[pick()](x);
    const double delta = x - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (x - mean);
    if (histogram && x >= histogram->lo && x < histogram->hi) {
      auto bin = static_cast<int>((x - histogram->lo) / (histogram->hi - histogram->lo) * histogram->bins);
      r.histogram[std::min(bin, histogram->bins - 1)] += 1;
    }
  }
  r.samples = n_samples;
  r.mean = mean;
  r.variance = m2 / static_cast<double>(n_samples);
  return r;
}

std::vector<double> solve_moments(const AffineIFS& ifs, int max_order) {
  ifs.check();
  if (max_order < 1)
    throw std::invalid_argument("solve_moments: max_order must be >= 1");
  std::vector<double> m(max_order + 1, 0.0);
  m[0] = 1.0;
  // binomial row r, rebuilt incrementally
  std::vector<double> binom{1.0};
  for (int r = 1; r <= max_order; ++r) {
    std::vector<double> row(r + 1, 1.0);
    for (int s = 1; s < r; ++s)
      row[s] = binom[s - 1] + binom[s];
    binom = std::move(row);

    double rhs = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
      const double p = ifs.weights[i], a = ifs.maps[i].a, b = ifs.maps[i].b;
      if (p == 0.0)
        continue;
      for (int s = 0; s < r; ++s)
        rhs += p * binom[s] * std::pow(a, s) * std::pow(b, r - s) * m[s];
      diag += p * std::pow(a, r);
    }
    m[r] = rhs / (1.0 - diag);
  }
  return m;
}

double wasserstein1(const PointMassCloud& p, const PointMassCloud& q) {
  struct Event {
    double x;
    double dm;
  };
  std::vector<Event> events;
  events.reserve(p.size() + q.size());
  for (const auto& a : p)
    events.push_back({a.position, a.mass});
  for (const auto& a : q)
    events.push_back({a.position, -a.mass});
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.x < y.x; });
  double w = 0.0, diff = 0.0;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    diff += events[i].dm;
    w += std::abs(diff) * (events[i + 1].x - events[i].x);
  }
  return w;
}

double self_similarity_residual(const AffineIFS& ifs, const PointMassCloud& cloud) {
  ifs.check();
  return wasserstein1(cloud, hutchinson_step(ifs, cloud));
}

Interval invariant_interval(const AffineIFS& ifs) {
  ifs.check();
  double lo = ifs.maps[0].fixed_point(), hi = lo;
  for (const auto& m : ifs.maps) {
    lo = std::min(lo, m.fixed_point());
    hi = std::max(hi, m.fixed_point());
  }
  for (int it = 0; it < 1'000'000; ++it) {
    double nlo = lo, nhi = hi;
    for (const auto& m : ifs.maps) {
      nlo = std::min({nlo, m(lo), m(hi)});
      nhi = std::max({nhi, m(lo), m(hi)});
    }
    if (nlo == lo && nhi == hi)
      break;
    lo = nlo;
    hi = nhi;
  }
  return {lo, hi};
}

AttractorCover attractor_cover(const AffineIFS& ifs, int k, std::uint64_t node_cap) {
  ifs.check();
  if (k < 1)
    throw std::invalid_argument("attractor_cover: k must be >= 1");
  AttractorCover cover;
  cover.hull = invariant_interval(ifs);
  cover.diameter_bound = std::pow(ifs.contraction(), k) * cover.hull.length();

  // word order a_1..a_k: the image of [L,U] under sigma_{a_1} o ... o sigma_{a_k}
  // is built as the composite map applied once.
  std::vector<AffineMap> words{{1.0, 0.0}};
  for (int level = 0; level < k; ++level) {
    if (words.size() * ifs.maps.size() > node_cap)
      throw DepthOverflow("attractor_cover exceeds the node cap");
    std::vector<AffineMap> next;
    next.reserve(words.size() * ifs.maps.size());
    for (const auto& w : words)
      for (const auto& m : ifs.maps)
        next.push_back({w.a * m.a, w.a * m.b + w.b});
    words = std::move(next);
  }

  for (const auto& w : words) {
    const double x = w(cover.hull.lo), y = w(cover.hull.hi);
    cover.intervals.push_back({std::min(x, y), std::max(x, y)});
    cover.max_diameter = std::max(cover.max_diameter, std::abs(y - x));
  }

  std::vector<Interval> sorted = cover.intervals;
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  const double tol = 1e-12 * std::max(cover.hull.length(), 1e-300);
  double reach = sorted.front().hi;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lo < reach - tol)
      cover.non_overlapping = false;
    reach = std::max(reach, sorted[i].hi);
  }
  return cover;
}

} // namespace ifsm
