#pragma once

#include "ifsm/cuntz.hpp"
#include "ifsm/filterbank.hpp"
#include "ifsm/nadic_measure.hpp"

#include <string>
#include <vector>

namespace ifsm {

inline constexpr double kDefaultAcTol = 1e-12;

/// Text attached to every cyclicity report.
extern const char* const kCyclicityCaveat;

/// mu_f o sigma_j^{-1} = mu_{S_j f} at depth k, computed by applying S_j and
/// enumerating. The digit-prepend route (mu_f^(k-1) with j prepended to
/// every address) is computed as well; a disagreement above 1e-12 in total
/// variation throws std::logic_error.
AtomicMeasure pushforward_measure(const FilterBank& fb, const CoeffVector& f, int j, int k,
                                  const AtomTreeOptions& options = {});

/// mu_f^(k-1) with digit j prepended to every address.
AtomicMeasure pushforward_by_prepend(const FilterBank& fb, const CoeffVector& f, int j, int k,
                                     const AtomTreeOptions& options = {});

enum class Verdict { NoViolationAtLevel, Violation };

const char* to_string(Verdict v);

struct CyclicityWitness {
  int channel = 0;
  NAdicAddress address;
  double push_mass = 0.0;
  double base_mass = 0.0;
};

/// Finite-level check of mu_f o sigma_j^{-1} << mu_f. A violation rules
/// out cyclicity of f; its absence at one level proves nothing.
struct CyclicityReport {
  int level = 0;
  Verdict verdict = Verdict::NoViolationAtLevel;
  std::vector<CyclicityWitness> violations;
};

CyclicityReport cyclicity_test(const FilterBank& fb, const CoeffVector& f, int k,
                               double ac_tol = kDefaultAcTol);

struct RadonNikodymProfile {
  struct Ratio {
    NAdicAddress address;
    double ratio = 0.0;
  };
  std::vector<Ratio> ratios;
  /// addresses with mu1 mass > ac_tol where mu2 mass <= ac_tol
  std::vector<NAdicAddress> singular;
};

/// Per-atom d mu1 / d mu2 at the common partition depth.
RadonNikodymProfile radon_nikodym_profile(const AtomicMeasure& mu1, const AtomicMeasure& mu2,
                                          double ac_tol = kDefaultAcTol);

struct EigenCrossCheck {
  EigenSolution eigen;
  /// the rest is only filled when eigen.found
  std::size_t cascade_atoms = 0;
  std::size_t tree_atoms = 0;
  /// every cascade atom sits on the N^-k grid and the supports agree
  bool positions_match = false;
  double max_mass_discrepancy = 0.0;
};

/// Compares the cascade of the N-adic IFS with weights |lambda_j|^2 against
/// mu_f^(k) for the joint eigenvector f, both at depth k from seed 0.
EigenCrossCheck eigen_cross_check(const FilterBank& fb, int k, int window, double eigen_tol = kDefaultEigenTol,
                                  double ac_tol = kDefaultAcTol);

struct ConvergenceRow {
  int k = 0;
  /// sup over the grid of |F^(k) - F^(k_max)|
  double sup_diff = 0.0;
  /// N^{-k}
  double scale = 0.0;
};

std::vector<ConvergenceRow> convergence_profile(const FilterBank& fb, const CoeffVector& f, int k_min,
                                                int k_max, std::span<const double> grid,
                                                const AtomTreeOptions& options = {});

} // namespace ifsm
