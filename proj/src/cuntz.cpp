#include "ifsm/cuntz.hpp"

#include "ifsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace ifsm {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

const LaurentPolynomial& filter_at(const FilterBank& fb, int j) {
  if (j < 0 || j >= fb.n_channels || j >= static_cast<int>(fb.filters.size()))
    throw ChannelOutOfRange("channel " + std::to_string(j) + " outside 0.." +
                            std::to_string(fb.n_channels - 1));
  return fb.filters[j];
}

} // namespace

CoeffVector apply_s(const FilterBank& fb, int j, const CoeffVector& f) {
  const auto& m = filter_at(fb, j);
  if (f.empty() || m.is_zero())
    return {};
  const std::int64_t n = fb.n_channels;
  const std::int64_t lo = n * f.first() + m.min_degree();
  const std::int64_t hi = n * f.last() + m.max_degree();
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(hi - lo + 1);
  const auto& c = m.coeffs().values();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Complex fm = f.values()(i);
    if (fm == Complex(0.0))
      continue;
    const std::int64_t start = n * (f.first() + i) + m.min_degree() - lo;
    g.segment(start, c.size()) += fm * c;
  }
  return CoeffVector(lo, std::move(g));
}

CoeffVector apply_s_star(const FilterBank& fb, int j, const CoeffVector& f) {
  const auto& m = filter_at(fb, j);
  if (f.empty() || m.is_zero())
    return {};
  const std::int64_t n = fb.n_channels;
  const std::int64_t lo = ceil_div(f.first() - m.max_degree(), n);
  const std::int64_t hi = floor_div(f.last() - m.min_degree(), n);
  if (hi < lo)
    return {};
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(hi - lo + 1);
  const auto& c = m.coeffs().values();
  for (std::int64_t out = lo; out <= hi; ++out) {
    Complex acc = 0.0;
    for (Eigen::Index d = 0; d < c.size(); ++d)
      acc += std::conj(c(d)) * f[n * out + m.min_degree() + d];
    g(out - lo) = acc;
  }
  return CoeffVector(lo, std::move(g));
}

IndexRange adjoint_support_bound(const FilterBank& fb, IndexRange support) {
  if (support.empty())
    return support;
  const std::int64_t n = fb.n_channels;
  return {ceil_div(support.lo - fb.max_degree(), n), floor_div(support.hi - fb.min_degree(), n)};
}

IndexRange adjoint_attractor(const FilterBank& fb, IndexRange start) {
  IndexRange r = start;
  for (int it = 0; it < 256; ++it) {
    const IndexRange next = adjoint_support_bound(fb, r);
    if (next == r)
      return r;
    r = next;
  }
  return r;
}

Eigen::MatrixXcd restricted_adjoint(const FilterBank& fb, int j, IndexRange window) {
  const auto& m = filter_at(fb, j);
  const std::int64_t n = fb.n_channels;
  const Eigen::Index dim = window.size();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [d, c] : m.coeffs().entries()) {
    for (std::int64_t col = window.lo; col <= window.hi; ++col) {
      if ((col - d) % n != 0)
        continue;
      const std::int64_t row = (col - d) / n;
      if (row < window.lo || row > window.hi)
        throw WindowTooSmall("S_" + std::to_string(j) + "^* maps e_" + std::to_string(col) +
                             " outside window [" + std::to_string(window.lo) + ", " +
                             std::to_string(window.hi) + "]");
      a(row - window.lo, col - window.lo) += std::conj(c);
    }
  }
  return a;
}

Eigen::VectorXcd to_window(const CoeffVector& f, IndexRange window) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(window.size());
  for (const auto& [idx, c] : f.entries()) {
    if (idx < window.lo || idx > window.hi)
      throw std::invalid_argument("to_window: vector support exceeds window");
    v(idx - window.lo) = c;
  }
  return v;
}

CoeffVector from_window(const Eigen::VectorXcd& v, IndexRange window) {
  return CoeffVector(window.lo, v);
}

CuntzReport verify_cuntz_relations(const FilterBank& fb, std::span<const CoeffVector> probes) {
  if (probes.empty())
    throw std::invalid_argument("verify_cuntz_relations: no probes");
  const int n = fb.n_channels;
  CuntzReport report;
  for (const auto& f : probes) {
    std::vector<CoeffVector> s(n), s_star(n);
    for (int j = 0; j < n; ++j) {
      s[j] = apply_s(fb, j, f);
      s_star[j] = apply_s_star(fb, j, f);
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        CoeffVector r = apply_s_star(fb, j, s[k]);
        if (j == k)
          r -= f;
        report.orthogonality_defect = std::max(report.orthogonality_defect, r.norm());
      }
    CoeffVector sum;
    for (int j = 0; j < n; ++j)
      sum += apply_s(fb, j, s_star[j]);
    report.completeness_defect = std::max(report.completeness_defect, (sum - f).norm());
  }
  return report;
}

int default_eigen_window(const FilterBank& fb) {
  fb.check_shape();
  const std::int64_t deg = std::max(std::abs(fb.min_degree()), std::abs(fb.max_degree()));
  return static_cast<int>(std::max<std::int64_t>(8, 2 * deg));
}

namespace {

constexpr double kClusterTol = 1e-6;

/// Eigenvalue clusters ordered by real part (descending), then imaginary
/// part (descending). Each cluster is represented by its mean, which stays
/// accurate when the eigenvalue is defective.
std::vector<Complex> clustered_eigenvalues(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(a, /*computeEigenvectors=*/false);
  std::vector<std::vector<Complex>> clusters;
  for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i) {
    const Complex v = ces.eigenvalues()(i);
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const auto& c) { return std::abs(c.front() - v) <= kClusterTol; });
    if (it == clusters.end())
      clusters.push_back({v});
    else
      it->push_back(v);
  }
  std::vector<Complex> means;
  for (const auto& c : clusters) {
    Complex s = 0.0;
    for (auto v : c)
      s += v;
    means.push_back(s / static_cast<double>(c.size()));
  }
  std::sort(means.begin(), means.end(), [](Complex x, Complex y) {
    if (std::abs(x.real() - y.real()) > 1e-9)
      return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return means;
}

/// Orthonormal basis of {c : |m c| <= tol |c|}.
Eigen::MatrixXcd near_null_space(const Eigen::MatrixXcd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    if (i >= sv.size() || sv(i) <= tol)
      keep.push_back(i);
  Eigen::MatrixXcd basis(m.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(keep[c]);
  return basis;
}

struct Search {
  const std::vector<Eigen::MatrixXcd>& ops;
  double tol;

  std::optional<Eigen::VectorXcd> intersect(const Eigen::MatrixXcd& basis,
                                            std::vector<int> remaining) const {
    if (basis.cols() == 0)
      return std::nullopt;
    if (remaining.empty())
      return Eigen::VectorXcd(basis.col(0));
    const int i = remaining.front();
    remaining.erase(remaining.begin());
    const Eigen::MatrixXcd av = ops[i] * basis;
    const Eigen::MatrixXcd projected = basis.adjoint() * av;
    for (const Complex mu : clustered_eigenvalues(projected)) {
      const Eigen::MatrixXcd shifted = av - mu * basis;
      const Eigen::MatrixXcd sub = near_null_space(shifted, tol);
      if (sub.cols() == 0)
        continue;
      if (auto hit = intersect(basis * sub, remaining))
        return hit;
    }
    return std::nullopt;
  }
};

} // namespace

EigenSolution solve_joint_eigenproblem(const FilterBank& fb, int w, double eigen_tol) {
  fb.check_shape();
  if (w < 1)
    throw std::invalid_argument("solve_joint_eigenproblem: window must be >= 1");
  const int n = fb.n_channels;
  const IndexRange window{-w, w};
  for (int j = 0; j < n; ++j)
    restricted_adjoint(fb, j, window);

  EigenSolution out;
  out.window = window;
  const IndexRange core = adjoint_attractor(fb, window);
  if (core.empty())
    return out;

  std::vector<Eigen::MatrixXcd> ops;
  for (int j = 0; j < n; ++j)
    ops.push_back(restricted_adjoint(fb, j, core));

  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(core.size(), core.size());
  const Search search{ops, eigen_tol};
  const double pivot_floor = 1.0 / std::sqrt(static_cast<double>(n)) - kClusterTol;

  for (int p = 0; p < n; ++p) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != p)
        others.push_back(j);
    for (const Complex lambda : clustered_eigenvalues(ops[p])) {
      if (std::abs(lambda) < pivot_floor)
        continue;
      const Eigen::MatrixXcd basis = near_null_space(ops[p] - lambda * identity, eigen_tol);
      const auto hit = search.intersect(basis, others);
      if (!hit)
        continue;

      Eigen::VectorXcd v = hit->normalized();
      Eigen::Index at = 0;
      v.cwiseAbs().maxCoeff(&at);
      v *= std::conj(v(at)) / std::abs(v(at));

      std::vector<Complex> lambdas(n);
      double residual = 0.0;
      for (int j = 0; j < n; ++j) {
        const Eigen::VectorXcd av = ops[j] * v;
        lambdas[j] = v.dot(av);
        residual = std::max(residual, (av - lambdas[j] * v).norm());
      }
      if (residual > eigen_tol)
        continue;
      out.found = true;
      out.vector = from_window(v, core);
      out.lambdas = std::move(lambdas);
      out.residual = residual;
      return out;
    }
  }
  return out;
}

} // namespace ifsm
