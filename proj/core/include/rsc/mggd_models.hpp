#ifndef RSC_MGGD_MODELS_HPP
#define RSC_MGGD_MODELS_HPP

#include <cstdint>

#include "rsc/spd_core.hpp"

namespace rsc {

/// n observations in R^p, one per row.
struct SampleSet {
  Matrix rows;  // n x p

  int n() const { return static_cast<int>(rows.rows()); }
  int p() const { return static_cast<int>(rows.cols()); }
};

/// A rho function with its derivative u = rho' and the convexity flags the
/// solvers rely on.
///   MGGD:  rho(x) = x^beta / 2
///   Tyler: rho(x) = (p/2) log x      (scale invariant; needs dimension p)
///   Huber: u(x) = 1/2 below the threshold, threshold/(2x) above
struct RhoFamily {
  enum class Kind { MGGD, Tyler, Huber };

  Kind kind = Kind::MGGD;
  double beta = 1.0;          // MGGD shape
  int p = 0;                  // Tyler dimension
  double huber_threshold = 1.0;

  static RhoFamily mggd(double beta);
  static RhoFamily tyler(int p);
  static RhoFamily huber(double threshold);

  double rho(double x) const;
  double u(double x) const;

  bool nondecreasing() const { return true; }
  /// rho(e^x) convex — Theorem-1-style geodesic convexity condition.
  bool rho_exp_convex() const { return true; }
  /// rho(x^2) convex — required by the Cholesky-domain solvers.
  bool rho_sq_convex() const;
  /// rho'' <= 0, the regime where the MM surrogate guarantees descent.
  bool u_nonincreasing() const;
};

/// Negative log-likelihood: sum_i rho(z_i^T S^{-1} z_i) + (n/2) log det S.
double neg_log_likelihood(const Matrix& scatter, const SampleSet& data, const RhoFamily& f);

/// Same objective in the Cholesky parameterization of the concentration,
/// S^{-1} = C C^T:  sum_i rho(||C^T z_i||^2) - n * sum_j log C_jj.
double cholesky_objective(const LowerFactor& c, const SampleSet& data, const RhoFamily& f);

/// MGGD log-density at z with center mu, scatter S and shape beta.
double mggd_log_density(const Vector& z, const Vector& mu, const Matrix& scatter, double beta);

/// log of the MGGD normalization constant C_{p,beta}.
double mggd_log_norm_constant(int p, double beta);

/// Draw n MGGD samples: z = mu + r A w with A = chol(S), w uniform on the
/// sphere, r = (2s)^{1/(2 beta)}, s ~ Gamma(p/(2 beta), 1).  Deterministic
/// given the seed.
SampleSet mggd_sample(int n, const Vector& mu, const Matrix& scatter, double beta,
                      std::uint64_t seed);

/// Scatter-to-covariance scale: cov = c(beta) * Sigma.
double covariance_scale(double beta, int p);

}  // namespace rsc

#endif  // RSC_MGGD_MODELS_HPP
