#pragma once

#include "ifsm/coeff_vector.hpp"
#include "ifsm/filterbank.hpp"

#include <Eigen/QR>

#include <random>
#include <string>
#include <vector>

namespace ifsm::testing {

struct NamedBank {
  std::string name;
  FilterBank bank;
};

/// Every bank shipped under fixtures/, built in code.
inline std::vector<NamedBank> fixture_banks() {
  return {{"shift", monomial_bank(2)},       {"haar", haar_bank()},
          {"fourier3", fourier_basis_bank(3)}, {"fourier4", fourier_basis_bank(4)},
          {"monomial3", monomial_bank(3)},   {"d4", daubechies4_bank()}};
}

inline FilterBank degenerate_bank() {
  const double r = 1.0 / std::sqrt(2.0);
  return {2, {LaurentPolynomial::monomial(0, r), LaurentPolynomial::monomial(0, r)}};
}

inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

/// Bank whose polyphase matrix U_0 D_1(z) U_1 ... D_L(z) U_L is unitary on
/// the circle; D_l = diag(z^{s_i}) with random s_i in {0, 1}.
inline FilterBank random_bank(std::mt19937_64& rng, int n, int layers) {
  // polyphase entries as coefficient lists in zeta = z^N
  using Poly = std::vector<Complex>;
  std::vector<std::vector<Poly>> h(n, std::vector<Poly>(n));
  Eigen::MatrixXcd u = random_unitary(rng, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h[i][j] = {u(i, j)};
  std::bernoulli_distribution coin(0.5);
  for (int l = 0; l < layers; ++l) {
    std::vector<int> shift(n);
    for (auto& s : shift)
      s = coin(rng) ? 1 : 0;
    const Eigen::MatrixXcd v = random_unitary(rng, n);
    std::vector<std::vector<Poly>> next(n, std::vector<Poly>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Poly acc;
        for (int p = 0; p < n; ++p) {
          const Poly& src = h[i][p];
          for (std::size_t d = 0; d < src.size(); ++d) {
            const std::size_t deg = d + static_cast<std::size_t>(shift[p]);
            if (acc.size() <= deg)
              acc.resize(deg + 1, 0.0);
            acc[deg] += src[d] * v(p, j);
          }
        }
        next[i][j] = acc;
      }
    h = std::move(next);
  }
  // m_j(z) = sum_p z^p H_{jp}(z^N)
  FilterBank fb{n, {}};
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<std::int64_t, Complex>> entries;
    for (int p = 0; p < n; ++p)
      for (std::size_t d = 0; d < h[j][p].size(); ++d)
        entries.emplace_back(p + static_cast<std::int64_t>(d) * n, h[j][p][d]);
    fb.filters.emplace_back(CoeffVector::from_entries(entries));
  }
  return fb;
}

/// Unit vector with `count` random entries at distinct indices in [lo, hi].
inline CoeffVector random_vector(std::mt19937_64& rng, int count, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> idx(lo, hi);
  std::normal_distribution<double> g;
  std::vector<std::pair<std::int64_t, Complex>> entries;
  for (int i = 0; i < count; ++i)
    entries.emplace_back(idx(rng), Complex(g(rng), g(rng)));
  CoeffVector v = CoeffVector::from_entries(entries);
  return Complex(1.0 / v.norm()) * v;
}

} // namespace ifsm::testing
