#include "ifsm/errors.hpp"
#include "ifsm/hutchinson.hpp"

#include <doctest.h>

#include <cmath>

using namespace ifsm;

namespace {

AffineIFS cantor() { return {{{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}}, {0.5, 0.5}}; }
AffineIFS dyadic() { return nadic_ifs(2, {0.5, 0.5}); }

double cloud_mass(const PointMassCloud& c) {
  double s = 0.0;
  for (const auto& p : c)
    s += p.mass;
  return s;
}

} // namespace

TEST_CASE("IFS validation") {
  CHECK_NOTHROW(cantor().check());
  AffineIFS bad = cantor();
  bad.weights = {0.5, 0.6};
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  bad = cantor();
  bad.maps[1].a = 1.0;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  bad = cantor();
  bad.weights = {1.5, -0.5};
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  bad = cantor();
  bad.weights.pop_back();
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  CHECK(cantor().contraction() == doctest::Approx(1.0 / 3));
}

TEST_CASE("cascade examples") {
  const auto c1 = cascade(cantor(), 1);
  REQUIRE(c1.size() == 2);
  CHECK(c1[0].position == 0.0);
  CHECK(c1[0].mass == 0.5);
  CHECK(c1[1].position == doctest::Approx(2.0 / 3));
  CHECK(c1[1].mass == 0.5);

  for (int k : {0, 1, 5, 12}) {
    const auto d = cascade(dyadic(), k);
    REQUIRE(d.size() == (std::size_t{1} << k));
    const double step = std::ldexp(1.0, -k);
    for (std::size_t j = 0; j < d.size(); ++j) {
      CHECK(d[j].position == j * step);
      CHECK(d[j].mass == step);
    }
  }

  const AffineIFS degenerate{{{0.5, 0.1}, {0.5, 0.5}}, {1.0, 0.0}};
  const auto g = cascade(degenerate, 6, 0.7);
  REQUIRE(g.size() == 1);
  double x = 0.7;
  for (int i = 0; i < 6; ++i)
    x = 0.5 * x + 0.1;
  CHECK(g[0].position == doctest::Approx(x));
  CHECK(g[0].mass == 1.0);

  CHECK_THROWS_AS(cascade(dyadic(), 30, 0.0, 1000), DepthOverflow);
}

TEST_CASE("cascade mass is one at every depth") {
  const AffineIFS skew{{{0.3, 0.0}, {0.25, 0.3}, {0.4, 0.6}}, {0.2, 0.5, 0.3}};
  for (int k = 0; k <= 9; ++k) {
    CHECK(std::abs(cloud_mass(cascade(skew, k)) - 1.0) <= 1e-12);
    CHECK(std::abs(cloud_mass(cascade(cantor(), k, 0.4)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("coincident atoms are merged") {
  // both maps send 0 to 0 at the first level
  const AffineIFS twin{{{0.5, 0.0}, {0.25, 0.0}}, {0.5, 0.5}};
  const auto c = cascade(twin, 1, 0.0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].mass == 1.0);
  const auto n = normalize_cloud({{0.3, 0.2}, {0.1, 0.5}, {0.3 + 1e-16, 0.3}});
  REQUIRE(n.size() == 2);
  CHECK(n[0].position == 0.1);
  CHECK(n[1].mass == doctest::Approx(0.5));
}

TEST_CASE("moments of the invariant measure") {
  const auto m = solve_moments(cantor(), 4);
  CHECK(m[0] == 1.0);
  CHECK(std::abs(m[1] - 0.5) < 1e-14);
  CHECK(std::abs(m[2] - 0.375) < 1e-14);

  const auto l = solve_moments(dyadic(), 6);
  for (int r = 0; r <= 6; ++r)
    CHECK(std::abs(l[r] - 1.0 / (r + 1)) <= 1e-12);

  const AffineIFS point{{{0.5, 0.0}, {0.5, 0.5}}, {1.0, 0.0}};
  const auto d = solve_moments(point, 5);
  CHECK(d[0] == 1.0);
  for (int r = 1; r <= 5; ++r)
    CHECK(d[r] == 0.0);

  CHECK_THROWS_AS(solve_moments(cantor(), 0), std::invalid_argument);
}

TEST_CASE("moments agree with deep cascades") {
  // the cascade from a point of the attractor has moments converging at rate c^k
  const AffineIFS skew{{{0.3, 0.0}, {-0.25, 0.5}, {0.4, 0.6}}, {0.2, 0.5, 0.3}};
  const auto m = solve_moments(skew, 3);
  const auto cloud = cascade(skew, 12, skew.maps[0].fixed_point());
  for (int r = 1; r <= 3; ++r) {
    double s = 0.0;
    for (const auto& p : cloud)
      s += p.mass * std::pow(p.position, r);
    CHECK(std::abs(s - m[r]) <= 1e-5);
  }
}

TEST_CASE("chaos game statistics") {
  const auto c = chaos_game(cantor(), 1'000'000, 100, 1);
  CHECK(c.samples == 1'000'000);
  CHECK(std::abs(c.mean - 0.5) <= 0.002);
  CHECK(std::abs(c.variance - 0.125) <= 0.002);

  const auto d = chaos_game(dyadic(), 1'000'000, 100, 2);
  CHECK(std::abs(d.mean - 0.5) <= 0.002);
  CHECK(std::abs(d.variance - 1.0 / 12) <= 0.002);

  // 3 sigma bands around the exact moments
  const auto m = solve_moments(cantor(), 2);
  const double sigma = std::sqrt(c.variance / static_cast<double>(c.samples));
  CHECK(std::abs(c.mean - m[1]) <= 3 * sigma);
}

TEST_CASE("chaos game is reproducible for a fixed seed") {
  const HistogramSpec h{16, 0.0, 1.0};
  const auto a = chaos_game(cantor(), 20'000, 10, 77, h);
  const auto b = chaos_game(cantor(), 20'000, 10, 77, h);
  const auto c = chaos_game(cantor(), 20'000, 10, 78, h);
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  CHECK(a.histogram == b.histogram);
  CHECK(a.mean != c.mean);
  REQUIRE(a.histogram.size() == 16);
  std::uint64_t total = 0;
  for (auto n : a.histogram)
    total += n;
  CHECK(total == 20'000);
  // the middle third carries no Cantor mass
  for (int bin = 6; bin < 10; ++bin)
    CHECK(a.histogram[bin] == 0);
  CHECK_THROWS_AS(chaos_game(cantor(), 0, 0, 1), std::invalid_argument);
}

TEST_CASE("Wasserstein distance") {
  CHECK(wasserstein1({{0.0, 1.0}}, {{0.25, 1.0}}) == doctest::Approx(0.25));
  CHECK(wasserstein1({{0.0, 0.5}, {1.0, 0.5}}, {{0.5, 1.0}}) == doctest::Approx(0.5));
  const PointMassCloud p{{0.1, 0.3}, {0.4, 0.7}};
  CHECK(wasserstein1(p, p) == 0.0);
}

TEST_CASE("self-similarity residual") {
  const auto c8 = cascade(cantor(), 8);
  const double r8 = self_similarity_residual(cantor(), c8);
  CHECK(r8 <= std::pow(3.0, -8));
  // W1(mu_k, mu_{k+1}) = 3^{-k} W1(delta_0, mu_1) = 3^{-k} / 3
  CHECK(r8 == doctest::Approx(std::pow(3.0, -9)));

  const AffineIFS single{{{0.5, 0.0}}, {1.0}};
  CHECK(self_similarity_residual(single, {{0.0, 1.0}}) == 0.0);

  for (int k = 0; k <= 10; ++k)
    CHECK(self_similarity_residual(dyadic(), cascade(dyadic(), k)) <= std::ldexp(1.0, -k));

  const AffineIFS skew{{{0.3, 0.0}, {-0.25, 0.5}, {0.4, 0.6}}, {0.2, 0.5, 0.3}};
  for (const auto& ifs : {cantor(), dyadic(), skew}) {
    double prev = self_similarity_residual(ifs, cascade(ifs, 0, 0.9));
    for (int k = 1; k <= 8; ++k) {
      const double r = self_similarity_residual(ifs, cascade(ifs, k, 0.9));
      CHECK(r <= prev + 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("attractor cover") {
  const auto c = attractor_cover(cantor(), 2);
  CHECK(c.hull.lo == doctest::Approx(0.0));
  CHECK(c.hull.hi == doctest::Approx(1.0));
  REQUIRE(c.intervals.size() == 4);
  for (const auto& iv : c.intervals)
    CHECK(iv.length() == doctest::Approx(1.0 / 9));
  CHECK(c.non_overlapping);
  CHECK(c.max_diameter <= c.diameter_bound + 1e-15);

  for (int k = 1; k <= 6; ++k) {
    const auto d = attractor_cover(dyadic(), k);
    REQUIRE(d.intervals.size() == (std::size_t{1} << k));
    for (std::size_t j = 0; j < d.intervals.size(); ++j) {
      CHECK(d.intervals[j].lo == doctest::Approx(std::ldexp(double(j), -k)));
      CHECK(d.intervals[j].hi == doctest::Approx(std::ldexp(double(j + 1), -k)));
    }
    CHECK(d.non_overlapping);
  }

  // sigma_0 = x/2, sigma_1 = (x+0.2)/2 has hull [0, 0.2]; the images [0, 0.1] and
  // [0.1, 0.2] only touch
  const AffineIFS touching{{{0.5, 0.0}, {0.5, 0.1}}, {0.5, 0.5}};
  const auto t = attractor_cover(touching, 1);
  CHECK(t.hull.lo == doctest::Approx(0.0));
  CHECK(t.hull.hi == doctest::Approx(0.2));
  CHECK(t.non_overlapping);

  const AffineIFS overlapping{{{0.6, 0.0}, {0.6, 0.4}}, {0.5, 0.5}};
  const auto o = attractor_cover(overlapping, 1);
  CHECK(o.hull.hi == doctest::Approx(1.0));
  CHECK_FALSE(o.non_overlapping);

  CHECK_THROWS_AS(attractor_cover(cantor(), 0), std::invalid_argument);
}

TEST_CASE("invariant interval handles reflections") {
  const AffineIFS flip{{{-0.5, 1.0}, {0.5, 0.0}}, {0.5, 0.5}};
  const auto hull = invariant_interval(flip);
  for (const auto& m : flip.maps) {
    const double lo = std::min(m(hull.lo), m(hull.hi));
    const double hi = std::max(m(hull.lo), m(hull.hi));
    CHECK(lo >= hull.lo - 1e-12);
    CHECK(hi <= hull.hi + 1e-12);
  }
  CHECK(hull.lo == doctest::Approx(0.0));
  CHECK(hull.hi == doctest::Approx(1.0));
}
