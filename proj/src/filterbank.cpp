#include "ifsm/filterbank.hpp"

#include "ifsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ifsm {

Complex LaurentPolynomial::operator()(Complex z) const {
  if (is_zero())
    return 0.0;
  // Horner in z, then shift by z^min_degree.
  const auto& c = coeffs_.values();
  Complex acc = 0.0;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i)
    acc = acc * z + c(i);
  return acc * std::pow(z, static_cast<int>(min_degree()));
}

void FilterBank::check_shape() const {
  if (n_channels < 2)
    throw MalformedBank("filter bank needs N >= 2, got " + std::to_string(n_channels));
  if (static_cast<int>(filters.size()) != n_channels)
    throw MalformedBank("filter bank declares N = " + std::to_string(n_channels) + " but has " +
                        std::to_string(filters.size()) + " filters");
  for (std::size_t j = 0; j < filters.size(); ++j)
    if (filters[j].is_zero())
      throw MalformedBank("filter " + std::to_string(j) + " is identically zero");
}

std::int64_t FilterBank::min_degree() const {
  std::int64_t d = filters.at(0).min_degree();
  for (const auto& m : filters)
    d = std::min(d, m.min_degree());
  return d;
}

std::int64_t FilterBank::max_degree() const {
  std::int64_t d = filters.at(0).max_degree();
  for (const auto& m : filters)
    d = std::max(d, m.max_degree());
  return d;
}

int recommended_samples(const FilterBank& fb) {
  fb.check_shape();
  return static_cast<int>(4 * fb.degree_span() + 1);
}

ValidationReport validate_filterbank(const FilterBank& fb, int n_samples, double unitarity_tol) {
  fb.check_shape();
  if (n_samples < 2 * fb.degree_span() + 1)
    throw std::invalid_argument("validate_filterbank: n_samples below 2*span+1");
  if (!(unitarity_tol > 0.0))
    throw std::invalid_argument("validate_filterbank: unitarity_tol must be positive");

  const int n = fb.n_channels;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd m(n, n);

  ValidationReport report;
  report.samples_checked = n_samples;
  for (int s = 0; s < n_samples; ++s) {
    const double angle = 2.0 * std::numbers::pi * s / n_samples;
    for (int k = 0; k < n; ++k) {
      const Complex z = std::polar(1.0, angle + 2.0 * std::numbers::pi * k / n);
      for (int j = 0; j < n; ++j)
        m(j, k) = scale * fb.filters[j](z);
    }
    const double defect = (m.adjoint() * m - identity).cwiseAbs().maxCoeff();
    if (defect > report.max_defect) {
      report.max_defect = defect;
      report.worst_angle = angle;
    }
  }
  report.passed = report.max_defect <= unitarity_tol;
  return report;
}

ValidationReport validate_filterbank(const FilterBank& fb, double unitarity_tol) {
  return validate_filterbank(fb, recommended_samples(fb), unitarity_tol);
}

FilterBank fourier_basis_bank(int n) {
  if (n < 2)
    throw MalformedBank("fourier_basis_bank needs N >= 2");
  FilterBank fb{n, {}};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd c(n);
    for (int k = 0; k < n; ++k) {
      // exact values at the quarter turns keep e.g. the N=2 bank real
      const int r = (j * k) % n;
      if (4 * r % n == 0) {
        static constexpr Complex quarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        c(k) = scale * quarter[4 * r / n];
      } else {
        c(k) = scale * std::polar(1.0, 2.0 * std::numbers::pi * r / n);
      }
    }
    fb.filters.emplace_back(0, std::move(c));
  }
  return fb;
}

FilterBank monomial_bank(int n) {
  if (n < 2)
    throw MalformedBank("monomial_bank needs N >= 2");
  FilterBank fb{n, {}};
  for (int j = 0; j < n; ++j)
    fb.filters.push_back(LaurentPolynomial::monomial(j));
  return fb;
}

FilterBank daubechies4_bank() {
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::numbers::sqrt2;
  const double h[4] = {(1 + s3) / norm, (3 + s3) / norm, (3 - s3) / norm, (1 - s3) / norm};

  Eigen::VectorXcd low(4);
  for (int k = 0; k < 4; ++k)
    low(k) = h[k];
  // z * conj(m_0(-z)) = sum_k (-1)^k h_k z^{1-k}, degrees -2..1
  Eigen::VectorXcd high(4);
  for (int k = 0; k < 4; ++k)
    high(3 - k) = (k % 2 == 0 ? 1.0 : -1.0) * h[k];

  FilterBank fb{2, {}};
  fb.filters.emplace_back(0, std::move(low));
  fb.filters.emplace_back(-2, std::move(high));
  return fb;
}

} // namespace ifsm
