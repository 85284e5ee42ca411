#ifndef RSC_SPD_CORE_HPP
#define RSC_SPD_CORE_HPP

#include <Eigen/Dense>
#include <optional>

#include "rsc/errors.hpp"
#include "rsc/sparsity_graphs.hpp"

namespace rsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Lower-triangular factor with strictly positive diagonal.  When `pattern`
/// is set, below-diagonal entries outside the pattern are exactly zero.
struct LowerFactor {
  Matrix mat;
  std::optional<SparsityPattern> pattern;

  int dim() const { return static_cast<int>(mat.rows()); }
};

/// Cholesky factor C with C*C^T = m.  Throws NotPositiveDefinite when a
/// pivot <= 0 is encountered.
LowerFactor cholesky(const Matrix& m);

/// Point on the SPD geodesic from a to b at parameter t in [0,1]:
/// a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}, via symmetric eigendecomposition.
Matrix geodesic_point(const Matrix& a, const Matrix& b, double t);

/// Inverse of an SPD matrix via Cholesky solves.
Matrix spd_inverse(const Matrix& m);

/// log det of an SPD matrix as 2*sum_j log(C_jj), never via a raw determinant.
double log_det(const Matrix& m);

/// ||est - truth||_F^2 / ||truth||_F^2.
double normalized_sq_frobenius_error(const Matrix& est, const Matrix& truth);

/// Symmetric matrix power M^t with eigenvalues clamped below at 1e-14.
Matrix sym_power(const Matrix& m, double t);

}  // namespace rsc

#endif  // RSC_SPD_CORE_HPP
