#ifndef RSC_ESTIMATORS_HPP
#define RSC_ESTIMATORS_HPP

#include <optional>
#include <string>
#include <vector>

#include "rsc/mggd_models.hpp"
#include "rsc/sparsity_graphs.hpp"
#include "rsc/spd_core.hpp"

namespace rsc {

/// Per-sample nonnegative iteration weights alpha_i = u(z_i^T S^{-1} z_i).
using WeightVector = Vector;

struct FitConfig {
  enum class Init { Identity, Given, SampleCovariance };

  int max_iter = 30;
  double rel_tol = 1e-8;      // relative Frobenius change of the estimate
  double quad_clamp = 1e-12;  // lower clamp on quadratic forms fed to u
  Init init = Init::Identity;
  Matrix init_matrix;         // used when init == Init::Given
};

struct FitReport {
  Matrix scatter;
  std::optional<LowerFactor> factor;   // Cholesky factor of the concentration
  std::vector<double> objective_trace; // L0 per iterate
  int iterations = 0;
  bool converged = false;

  std::string to_json() const;
};

/// Unconstrained M-estimation by the reweighted fixed point
///   S_{m+1} = (2/n) sum_i u(z_i^T S_m^{-1} z_i) z_i z_i^T.
/// Tyler iterates are rescaled to trace p.
FitReport fit_fixed_point(const SampleSet& data, const RhoFamily& f, const FitConfig& cfg);

/// Closed-form minimizer of sum_i alpha_i ||C^T z_i||^2 - n sum_j log C_jj
/// over G-sparse lower-triangular C, by one weighted regression per column.
/// Requires the natural order to be a perfect elimination order of g.
LowerFactor solve_weighted_chordal_ggm(const SampleSet& data, const WeightVector& w,
                                       const SparsityPattern& g);

/// Majorization-minimization for the G-constrained M-estimate: reweight,
/// then solve the weighted chordal GGM in closed form.  Non-natural perfect
/// orders are handled by permuting internally.
FitReport fit_chordal_mm(const SampleSet& data, const RhoFamily& f, const SparsityPattern& g,
                         const FitConfig& cfg);

struct GgmSolution {
  Matrix scatter;
  int iterations = 0;
  bool converged = false;
};

/// First-order solver for the weighted GGM on an arbitrary pattern:
/// minimizes trace(K M) - (n/2) log det K over G-sparse SPD K with
/// M = sum_i alpha_i z_i z_i^T, by masked gradient descent with
/// backtracking.  `warm_start` (a concentration) skips the default init.
GgmSolution solve_weighted_ggm_general(const SampleSet& data, const WeightVector& w,
                                       const SparsityPattern& g, const FitConfig& cfg,
                                       const Matrix* warm_start = nullptr);

/// MM estimation on a general (possibly non-chordal) pattern, with the
/// masked-gradient GGM solver as the inner step.
FitReport fit_general_mm(const SampleSet& data, const RhoFamily& f, const SparsityPattern& g,
                         const FitConfig& cfg);

/// Direct convex minimization of the Cholesky-domain objective by projected
/// gradient descent on the free entries of C.  Requires rho(x^2) convex.
FitReport fit_direct_cholesky(const SampleSet& data, const RhoFamily& f,
                              const SparsityPattern& g, const FitConfig& cfg);

/// L1-penalized structure learning over full lower-triangular C by proximal
/// subgradient descent.
FitReport fit_l1_cholesky(const SampleSet& data, const RhoFamily& f, double lambda,
                          const FitConfig& cfg);

struct JointFit {
  FitReport report;
  Vector mean;
};

/// Alternating MM over the center and the G-constrained scatter.
JointFit fit_chordal_joint_mean(const SampleSet& data, const RhoFamily& f,
                                const SparsityPattern& g, const FitConfig& cfg);

}  // namespace rsc

#endif  // RSC_ESTIMATORS_HPP
