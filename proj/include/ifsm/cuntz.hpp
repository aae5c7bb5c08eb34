#pragma once

#include "ifsm/coeff_vector.hpp"
#include "ifsm/filterbank.hpp"

#include <span>
#include <vector>

namespace ifsm {

inline constexpr double kDefaultEigenTol = 1e-8;

/// S_j f(z) = m_j(z) f(z^N):  g(n) = sum_m c_j(n - N m) f(m).
CoeffVector apply_s(const FilterBank& fb, int j, const CoeffVector& f);

/// Adjoint of apply_s:  g(m) = sum_n conj(c_j(n - N m)) f(n).
CoeffVector apply_s_star(const FilterBank& fb, int j, const CoeffVector& f);

/// Index interval [lo, hi] that contains the support of S_j^* f whenever
/// f is supported in [first, last], for every channel.
struct IndexRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  bool empty() const { return hi < lo; }
  std::int64_t size() const { return empty() ? 0 : hi - lo + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};
IndexRange adjoint_support_bound(const FilterBank& fb, IndexRange support);

/// Smallest interval reached by iterating adjoint_support_bound from
/// `start`; every adjoint maps it into itself.
IndexRange adjoint_attractor(const FilterBank& fb, IndexRange start);

/// Matrix of S_j^* restricted to vectors supported in `window`, rows and
/// columns indexed by window.lo + i. Throws WindowTooSmall if some
/// nonzero coefficient of S_j^* e_n lands outside the window.
Eigen::MatrixXcd restricted_adjoint(const FilterBank& fb, int j, IndexRange window);

Eigen::VectorXcd to_window(const CoeffVector& f, IndexRange window);
CoeffVector from_window(const Eigen::VectorXcd& v, IndexRange window);

struct CuntzReport {
  /// max over probes and j,k of |S_j^* S_k f - delta_jk f|
  double orthogonality_defect = 0.0;
  /// max over probes of |sum_j S_j S_j^* f - f|
  double completeness_defect = 0.0;
  bool within(double tol) const { return orthogonality_defect <= tol && completeness_defect <= tol; }
};

CuntzReport verify_cuntz_relations(const FilterBank& fb, std::span<const CoeffVector> probes);

struct EigenSolution {
  bool found = false;
  /// unit vector, phase fixed so its largest entry is real positive
  CoeffVector vector;
  std::vector<Complex> lambdas;
  /// max_j |S_j^* f - lambda_j f|
  double residual = 0.0;
  /// window searched
  IndexRange window;
};

/// Default search radius: max(8, 2 * max |degree|).
int default_eigen_window(const FilterBank& fb);

/// Looks for a unit f supported in {-w..w} with S_j^* f = lambda_j f for all
/// j. A joint eigenvector with some lambda_j != 0 lives on the attractor of
/// the window, so the search runs there: each channel in turn serves as
/// pivot, its eigenspaces with |lambda| >= 1/sqrt(N) are intersected with
/// the near-eigenspaces of the remaining channels. found = false only
/// means nothing was found inside the window.
EigenSolution solve_joint_eigenproblem(const FilterBank& fb, int w,
                                       double eigen_tol = kDefaultEigenTol);

} // namespace ifsm
