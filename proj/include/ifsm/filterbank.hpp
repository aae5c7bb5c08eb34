#pragma once

#include "ifsm/coeff_vector.hpp"

#include <vector>

namespace ifsm {

inline constexpr double kDefaultUnitarityTol = 1e-10;

/// A filter m(z) = sum_d c_d z^d with finitely many nonzero coefficients.
class LaurentPolynomial {
public:
  LaurentPolynomial() = default;
  explicit LaurentPolynomial(CoeffVector coeffs) : coeffs_(std::move(coeffs)) {}
  LaurentPolynomial(std::int64_t min_degree, Eigen::VectorXcd coeffs)
      : coeffs_(min_degree, std::move(coeffs)) {}

  /// c * z^degree
  static LaurentPolynomial monomial(std::int64_t degree, Complex c = 1.0) {
    return LaurentPolynomial(CoeffVector::delta(degree, c));
  }

  bool is_zero() const { return coeffs_.empty(); }
  std::int64_t min_degree() const { return coeffs_.first(); }
  std::int64_t max_degree() const { return coeffs_.last(); }
  Complex coefficient(std::int64_t d) const { return coeffs_[d]; }
  const CoeffVector& coeffs() const { return coeffs_; }

  Complex operator()(Complex z) const;

private:
  CoeffVector coeffs_;
};

/// N filters m_0..m_{N-1} defining S_j f(z) = m_j(z) f(z^N).
struct FilterBank {
  int n_channels = 0;
  std::vector<LaurentPolynomial> filters;

  /// Throws MalformedBank unless N >= 2, there are exactly N filters and
  /// no filter is identically zero.
  void check_shape() const;

  std::int64_t min_degree() const;
  std::int64_t max_degree() const;
  /// max degree minus min degree over all filters
  std::int64_t degree_span() const { return max_degree() - min_degree(); }
};

struct ValidationReport {
  bool passed = false;
  double max_defect = 0.0;
  /// angle in [0, 2*pi) where the defect peaked
  double worst_angle = 0.0;
  int samples_checked = 0;
};

/// Smallest sample count that certifies unitarity for this bank: 4*span + 1.
int recommended_samples(const FilterBank& fb);

/// Samples M(z)_{j,k} = m_j(z w^k)/sqrt(N), w = exp(2 pi i/N), at n_samples
/// equispaced points of the circle and reports max |M*M - I|.
ValidationReport validate_filterbank(const FilterBank& fb, int n_samples,
                                     double unitarity_tol = kDefaultUnitarityTol);
ValidationReport validate_filterbank(const FilterBank& fb,
                                     double unitarity_tol = kDefaultUnitarityTol);

/// m_j(z) = N^{-1/2} sum_k exp(2 pi i jk/N) z^k; the N-adic Haar system.
FilterBank fourier_basis_bank(int n);
/// m_j(z) = z^j
FilterBank monomial_bank(int n);
/// m_0 = (1+z)/sqrt2, m_1 = (1-z)/sqrt2
inline FilterBank haar_bank() { return fourier_basis_bank(2); }
/// Daubechies 4-tap low-pass normalised so that m_0(1) = sqrt2, with the
/// high-pass m_1(z) = z * conj(m_0(-z)).
FilterBank daubechies4_bank();

} // namespace ifsm
