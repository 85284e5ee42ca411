#ifndef RSC_EXPERIMENTS_HPP
#define RSC_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rsc/estimators.hpp"

namespace rsc {

/// Generic rectangular result table; serialized as CSV with a header row.
struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct PrecisionModel {
  Matrix concentration;
  Matrix scatter;  // inverse of the concentration
};

/// Toeplitz precision: diag on the diagonal, offdiag within the band.
PrecisionModel toeplitz_banded_precision(int p, int width, double diag, double offdiag);

/// Grid precision: identity plus offdiag on grid edges; rejected unless
/// diagonally dominant.
PrecisionModel grid_precision(int rows, int cols, double offdiag = 0.2);

enum class EstimatorKind {
  SampleCovariance,   // "G"
  BandedGaussian,     // "BG" (pattern-constrained Gaussian MLE)
  Mggd,               // unconstrained MGGD fixed point
  BMggdIdentityInit,  // constrained MGGD MM, identity init
  BMggdTruthInit,     // constrained MGGD MM, init at the true scatter
};

std::string estimator_name(EstimatorKind k);

struct SyntheticSpec {
  int p = 10;
  double beta = 0.5;
  SparsityPattern pattern;
  Matrix truth;  // true scatter; its inverse must be pattern-sparse
  std::vector<int> n_grid;
  int trials = 500;
  std::vector<EstimatorKind> estimators;
  std::uint64_t seed = 1;
  int max_iter = 30;
};

/// Monte-Carlo sweep: per (estimator, n), the mean and standard error of the
/// normalized squared Frobenius error of the scatter estimate.  Gaussian
/// estimators are divided by c(beta) before comparison; uncorrected errors
/// are emitted in a separate column.  Trial t draws with seed spec.seed + t,
/// so results do not depend on the degree of parallelism.
ResultTable run_synthetic(const SyntheticSpec& spec);

struct ClassModel {
  Vector mean;
  Matrix covariance;
  double prior = 0.5;
};

/// argmax_c of log prior_c - (1/2) log det cov_c - (1/2) Mahalanobis^2,
/// ties toward the lowest class index.
int qda_classify(const std::vector<ClassModel>& models, const Vector& x);

struct LabeledDataset {
  Matrix features;          // n x d
  std::vector<int> labels;  // class indices starting at 0
  std::vector<std::string> class_names;
};

struct SonarConfig {
  std::vector<int> bandwidths = {2, 3, 4, 5, 6, 8, 10, 12, 15, 20};
  std::vector<double> betas = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int selection_splits = 10;  // random 2/3-1/3 splits for validation
  std::uint64_t seed = 1;
  int max_iter = 30;
};

/// Leave-one-out QDA comparison of sample covariance, naive Bayes, banded
/// Gaussian, and banded MGGD class covariance estimates.
ResultTable sonar_experiment(const LabeledDataset& data, const SonarConfig& cfg);

}  // namespace rsc

#endif  // RSC_EXPERIMENTS_HPP
