#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace ifsm {

using Complex = std::complex<double>;

/// Stored coefficients with modulus at or below this are treated as zero.
inline constexpr double kCoeffZeroTol = 1e-15;

/// A finitely supported sequence Z -> C (Fourier coefficients of a
/// trigonometric polynomial) stored as a contiguous block
/// starting at index `first()`. Leading and trailing entries with modulus
/// <= kCoeffZeroTol are trimmed and interior ones are set to exactly zero,
/// so an all-zero sequence is empty.
class CoeffVector {
public:
  CoeffVector() = default;
  CoeffVector(std::int64_t first, Eigen::VectorXcd values);

  /// Sequence with a single entry `value` at index `n`.
  static CoeffVector delta(std::int64_t n, Complex value = 1.0);
  /// Builds from sparse (index, value) pairs; repeated indices add up.
  static CoeffVector from_entries(const std::vector<std::pair<std::int64_t, Complex>>& entries);

  bool empty() const { return values_.size() == 0; }
  std::int64_t first() const { return first_; }
  /// Last stored index; only meaningful when !empty().
  std::int64_t last() const { return first_ + values_.size() - 1; }
  Eigen::Index size() const { return values_.size(); }
  const Eigen::VectorXcd& values() const { return values_; }

  /// Value at index n, zero outside the stored block.
  Complex operator[](std::int64_t n) const;

  /// Nonzero (index, value) pairs in ascending index order.
  std::vector<std::pair<std::int64_t, Complex>> entries() const;

  double squared_norm() const { return values_.squaredNorm(); }
  double norm() const { return values_.norm(); }

  /// Inner product <this, other>, conjugate-linear in `this`.
  Complex dot(const CoeffVector& other) const;

  CoeffVector& operator+=(const CoeffVector& other);
  CoeffVector& operator-=(const CoeffVector& other);
  CoeffVector& operator*=(Complex s);

  friend bool operator==(const CoeffVector& a, const CoeffVector& b) {
    return a.first_ == b.first_ && a.values_ == b.values_;
  }

private:
  void trim();

  std::int64_t first_ = 0;
  Eigen::VectorXcd values_;
};

inline CoeffVector operator+(CoeffVector a, const CoeffVector& b) { return a += b; }
inline CoeffVector operator-(CoeffVector a, const CoeffVector& b) { return a -= b; }
inline CoeffVector operator*(Complex s, CoeffVector a) { return a *= s; }

} // namespace ifsm
