#include "ifsm/diagnostics.hpp"

#include "ifsm/errors.hpp"
#include "ifsm/hutchinson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ifsm {

const char* const kCyclicityCaveat =
    "Assumes the algebra generated by the cylinder projections is maximal abelian. "
    "VIOLATION at a finite level rules out a cyclic vector; NO_VIOLATION_AT_LEVEL is "
    "evidence only and never a proof of cyclicity.";

const char* to_string(Verdict v) {
  return v == Verdict::Violation ? "VIOLATION" : "NO_VIOLATION_AT_LEVEL";
}

AtomicMeasure pushforward_by_prepend(const FilterBank& fb, const CoeffVector& f, int j, int k,
                                     const AtomTreeOptions& options) {
  if (k < 1)
    throw std::invalid_argument("pushforward needs depth k >= 1");
  if (j < 0 || j >= fb.n_channels)
    throw ChannelOutOfRange("pushforward channel out of range");
  const AtomicMeasure base = atom_tree(fb, f, k - 1, options);
  AtomicMeasure out{fb.n_channels, k, {}, base.pruned_mass};
  out.atoms.reserve(base.atoms.size());
  for (const auto& a : base.atoms)
    out.atoms.push_back({base.address(a).prepend(j).numerator, a.mass});
  return out;
}

AtomicMeasure pushforward_measure(const FilterBank& fb, const CoeffVector& f, int j, int k,
                                  const AtomTreeOptions& options) {
  if (k < 1)
    throw std::invalid_argument("pushforward needs depth k >= 1");
  AtomicMeasure direct = atom_tree(fb, apply_s(fb, j, f), k, options);
  const AtomicMeasure prepended = pushforward_by_prepend(fb, f, j, k, options);
  if (total_variation(direct, prepended) > 1e-12)
    throw std::logic_error("pushforward routes disagree; is the bank validated?");
  return direct;
}

CyclicityReport cyclicity_test(const FilterBank& fb, const CoeffVector& f, int k, double ac_tol) {
  if (std::abs(f.norm() - 1.0) > 1e-10)
    throw NotUnitVector("cyclicity_test needs |f| = 1, got " + std::to_string(f.norm()));
  const AtomicMeasure base = atom_tree(fb, f, k);
  CyclicityReport report;
  report.level = k;
  for (int j = 0; j < fb.n_channels; ++j) {
    const AtomicMeasure pushed = pushforward_measure(fb, f, j, k);
    for (const auto& a : pushed.atoms) {
      const double b = base.mass_at(a.numerator);
      if (a.mass > ac_tol && b <= ac_tol)
        report.violations.push_back({j, pushed.address(a), a.mass, b});
    }
  }
  report.verdict = report.violations.empty() ? Verdict::NoViolationAtLevel : Verdict::Violation;
  return report;
}

RadonNikodymProfile radon_nikodym_profile(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double ac_tol) {
  if (mu1.base != mu2.base || mu1.depth != mu2.depth)
    throw DepthMismatch("radon_nikodym_profile: measures on different partitions");
  RadonNikodymProfile profile;
  for (const auto& a : mu1.atoms) {
    const double m2 = mu2.mass_at(a.numerator);
    if (m2 > ac_tol)
      profile.ratios.push_back({mu1.address(a), a.mass / m2});
    else if (a.mass > ac_tol)
      profile.singular.push_back(mu1.address(a));
  }
  return profile;
}

EigenCrossCheck eigen_cross_check(const FilterBank& fb, int k, int window, double eigen_tol, double ac_tol) {
  EigenCrossCheck check;
  check.eigen = solve_joint_eigenproblem(fb, window, eigen_tol);
  if (!check.eigen.found)
    return check;

  const int n = fb.n_channels;
  std::vector<double> weights;
  double sum = 0.0;
  for (const auto& l : check.eigen.lambdas) {
    weights.push_back(std::norm(l));
    sum += weights.back();
  }
  // |lambda|^2 sums to 1 up to the eigen residual; renormalise for the IFS
  for (auto& w : weights)
    w /= sum;
  const PointMassCloud cloud = cascade(nadic_ifs(n, weights), k, 0.0);
  const AtomicMeasure tree = atom_tree(fb, check.eigen.vector, k);
  check.cascade_atoms = cloud.size();
  check.tree_atoms = tree.atoms.size();

  const double scale = std::pow(static_cast<double>(n), k);
  AtomicMeasure from_cascade{n, k, {}, 0.0};
  check.positions_match = true;
  for (const auto& p : cloud) {
    const double scaled = p.position * scale;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6 || rounded < 0 || rounded >= scale)
      check.positions_match = false;
    from_cascade.atoms.push_back({static_cast<std::uint64_t>(std::max(rounded, 0.0)), p.mass});
  }
  std::sort(from_cascade.atoms.begin(), from_cascade.atoms.end(),
            [](const Atom& a, const Atom& b) { return a.numerator < b.numerator; });

  auto support = [ac_tol](const AtomicMeasure& mu) {
    std::vector<std::uint64_t> s;
    for (const auto& a : mu.atoms)
      if (a.mass > ac_tol)
        s.push_back(a.numerator);
    return s;
  };
  if (support(from_cascade) != support(tree))
    check.positions_match = false;

  for (const auto& a : from_cascade.atoms)
    check.max_mass_discrepancy = std::max(check.max_mass_discrepancy, std::abs(a.mass - tree.mass_at(a.numerator)));
  for (const auto& a : tree.atoms)
    check.max_mass_discrepancy =
        std::max(check.max_mass_discrepancy, std::abs(a.mass - from_cascade.mass_at(a.numerator)));
  return check;
}

std::vector<ConvergenceRow> convergence_profile(const FilterBank& fb, const CoeffVector& f, int k_min, int k_max,
                                                std::span<const double> grid, const AtomTreeOptions& options) {
  if (!(k_min < k_max) || k_min < 0)
    throw std::invalid_argument("convergence_profile needs 0 <= k_min < k_max");
  AtomTree tree(fb, f, k_min, options);
  std::vector<std::vector<double>> levels;
  levels.push_back(cdf(tree.measure(), grid));
  for (int k = k_min + 1; k <= k_max; ++k)
    levels.push_back(cdf(tree.refine(), grid));

  std::vector<ConvergenceRow> rows;
  const auto& finest = levels.back();
  for (int k = k_min; k < k_max; ++k) {
    const auto& fk = levels[k - k_min];
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      sup = std::max(sup, std::abs(fk[i] - finest[i]));
    rows.push_back({k, sup, std::pow(static_cast<double>(fb.n_channels), -k)});
  }
  return rows;
}

} // namespace ifsm
