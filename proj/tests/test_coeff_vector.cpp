#include "ifsm/coeff_vector.hpp"

#include <doctest.h>

using namespace ifsm;

TEST_CASE("trimming drops tiny edge entries and zeroes tiny interior ones") {
  Eigen::VectorXcd v(5);
  v << 1e-16, 2.0, Complex(1e-16, 0), Complex(0, 3), 5e-16;
  const CoeffVector c(-2, v);
  CHECK(c.first() == -1);
  CHECK(c.last() == 1);
  CHECK(c[0] == Complex(0.0));
  CHECK(c[1] == Complex(0, 3));
  CHECK(c[7] == Complex(0.0));
  CHECK(c.squared_norm() == doctest::Approx(13.0));
  CHECK(c.entries().size() == 2);
}

TEST_CASE("all-zero input gives the empty vector") {
  const CoeffVector c(4, Eigen::VectorXcd::Constant(3, 1e-17));
  CHECK(c.empty());
  CHECK(c.squared_norm() == 0.0);
  CHECK(c.dot(CoeffVector::delta(4)) == Complex(0.0));
}

TEST_CASE("arithmetic and inner product") {
  const auto a = CoeffVector::from_entries({{0, 1.0}, {3, Complex(0, 1)}});
  const auto b = CoeffVector::from_entries({{3, 2.0}, {-1, 1.0}});
  CHECK(a.dot(b) == Complex(0, -2)); // conj(i) * 2
  const auto s = a + b;
  CHECK(s.first() == -1);
  CHECK(s[3] == Complex(2, 1));
  CHECK((a - a).empty());
  CHECK((Complex(0, 1) * a)[3] == Complex(-1, 0));
  CHECK(CoeffVector::from_entries({{2, 1.0}, {2, -1.0}}).empty());
}
