#include "ifsm/coeff_vector.hpp"

#include <algorithm>
#include <map>

namespace ifsm {

CoeffVector::CoeffVector(std::int64_t first, Eigen::VectorXcd values)
    : first_(first), values_(std::move(values)) {
  trim();
}

CoeffVector CoeffVector::delta(std::int64_t n, Complex value) {
  Eigen::VectorXcd v(1);
  v(0) = value;
  return CoeffVector(n, std::move(v));
}

CoeffVector CoeffVector::from_entries(const std::vector<std::pair<std::int64_t, Complex>>& entries) {
  if (entries.empty())
    return {};
  std::map<std::int64_t, Complex> acc;
  for (const auto& [n, c] : entries)
    acc[n] += c;
  const std::int64_t lo = acc.begin()->first;
  const std::int64_t hi = acc.rbegin()->first;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(hi - lo + 1);
  for (const auto& [n, c] : acc)
    v(n - lo) = c;
  return CoeffVector(lo, std::move(v));
}

void CoeffVector::trim() {
  const Eigen::Index n = values_.size();
  Eigen::Index lo = 0;
  while (lo < n && std::abs(values_(lo)) <= kCoeffZeroTol)
    ++lo;
  if (lo == n) {
    values_.resize(0);
    first_ = 0;
    return;
  }
  Eigen::Index hi = n - 1;
  while (std::abs(values_(hi)) <= kCoeffZeroTol)
    --hi;
  if (lo != 0 || hi != n - 1) {
    Eigen::VectorXcd kept = values_.segment(lo, hi - lo + 1);
    values_ = std::move(kept);
    first_ += lo;
  }
  for (auto& c : values_)
    if (std::abs(c) <= kCoeffZeroTol)
      c = 0.0;
}

Complex CoeffVector::operator[](std::int64_t n) const {
  if (empty() || n < first_ || n > last())
    return 0.0;
  return values_(n - first_);
}

std::vector<std::pair<std::int64_t, Complex>> CoeffVector::entries() const {
  std::vector<std::pair<std::int64_t, Complex>> out;
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (values_(i) != Complex(0.0))
      out.emplace_back(first_ + i, values_(i));
  return out;
}

Complex CoeffVector::dot(const CoeffVector& other) const {
  if (empty() || other.empty())
    return 0.0;
  const std::int64_t lo = std::max(first_, other.first_);
  const std::int64_t hi = std::min(last(), other.last());
  if (lo > hi)
    return 0.0;
  return values_.segment(lo - first_, hi - lo + 1)
      .dot(other.values_.segment(lo - other.first_, hi - lo + 1));
}

namespace {

CoeffVector combine(const CoeffVector& a, const CoeffVector& b, double sign) {
  if (b.empty())
    return a;
  if (a.empty())
    return CoeffVector(b.first(), sign * b.values());
  const std::int64_t lo = std::min(a.first(), b.first());
  const std::int64_t hi = std::max(a.last(), b.last());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(hi - lo + 1);
  v.segment(a.first() - lo, a.size()) = a.values();
  v.segment(b.first() - lo, b.size()) += sign * b.values();
  return CoeffVector(lo, std::move(v));
}

} // namespace

CoeffVector& CoeffVector::operator+=(const CoeffVector& other) {
  *this = combine(*this, other, 1.0);
  return *this;
}

CoeffVector& CoeffVector::operator-=(const CoeffVector& other) {
  *this = combine(*this, other, -1.0);
  return *this;
}

CoeffVector& CoeffVector::operator*=(Complex s) {
  *this = CoeffVector(first_, s * values_);
  return *this;
}

} // namespace ifsm
