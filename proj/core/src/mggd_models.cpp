#include "rsc/mggd_models.hpp"

#include <cmath>
#include <random>

namespace rsc {

RhoFamily RhoFamily::mggd(double beta) {
  if (beta <= 0) throw InvalidShape("MGGD shape must be positive");
  RhoFamily f;
  f.kind = Kind::MGGD;
  f.beta = beta;
  return f;
}

RhoFamily RhoFamily::tyler(int p) {
  if (p < 1) throw InvalidShape("Tyler needs dimension >= 1");
  RhoFamily f;
  f.kind = Kind::Tyler;
  f.p = p;
  return f;
}

RhoFamily RhoFamily::huber(double threshold) {
  if (threshold <= 0) throw InvalidShape("Huber threshold must be positive");
  RhoFamily f;
  f.kind = Kind::Huber;
  f.huber_threshold = threshold;
  return f;
}

double RhoFamily::rho(double x) const {
  switch (kind) {
    case Kind::MGGD:
      return 0.5 * std::pow(x, beta);
    case Kind::Tyler:
      if (x <= 0) throw DomainError("Tyler rho undefined at 0");
      return 0.5 * p * std::log(x);
    case Kind::Huber: {
      const double t = huber_threshold;
      if (x <= t) return 0.5 * x;
      return 0.5 * t + 0.5 * t * std::log(x / t);
    }
  }
  return 0.0;
}

double RhoFamily::u(double x) const {
  switch (kind) {
    case Kind::MGGD:
      // u diverges at 0 for beta < 1; a sample at the origin must not
      // poison the weights.
      if (beta < 1.0) x = std::max(x, 1e-12);
      return 0.5 * beta * std::pow(x, beta - 1.0);
    case Kind::Tyler:
      if (x <= 0) throw DomainError("Tyler weight undefined at 0");
      return 0.5 * p / x;
    case Kind::Huber: {
      const double t = huber_threshold;
      return x <= t ? 0.5 : 0.5 * t / x;
    }
  }
  return 0.0;
}

bool RhoFamily::rho_sq_convex() const {
  switch (kind) {
    case Kind::MGGD:
      return beta >= 0.5;
    case Kind::Tyler:
      return false;
    case Kind::Huber:
      return true;
  }
  return false;
}

bool RhoFamily::u_nonincreasing() const {
  switch (kind) {
    case Kind::MGGD:
      return beta <= 1.0;
    case Kind::Tyler:
    case Kind::Huber:
      return true;
  }
  return false;
}

double neg_log_likelihood(const Matrix& scatter, const SampleSet& data, const RhoFamily& f) {
  if (scatter.rows() != data.p()) throw DimensionMismatch("scatter/data dimension mismatch");
  LowerFactor c = cholesky(scatter);
  const double ld = 2.0 * c.mat.diagonal().array().log().sum();
  // q_i = z_i^T S^{-1} z_i = ||C^{-1} z_i||^2 with S = C C^T
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    Vector y = c.mat.triangularView<Eigen::Lower>().solve(data.rows.row(i).transpose());
    double q = y.squaredNorm();
    if (q <= 0 && f.kind == RhoFamily::Kind::Tyler)
      throw DomainError("zero quadratic form under Tyler rho");
    acc += f.rho(q);
  }
  return acc + 0.5 * data.n() * ld;
}

double cholesky_objective(const LowerFactor& c, const SampleSet& data, const RhoFamily& f) {
  if (c.dim() != data.p()) throw DimensionMismatch("factor/data dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double q = (c.mat.transpose() * data.rows.row(i).transpose()).squaredNorm();
    acc += f.rho(q);
  }
  return acc - data.n() * c.mat.diagonal().array().log().sum();
}

double mggd_log_norm_constant(int p, double beta) {
  return std::log(beta) + std::lgamma(0.5 * p) - 0.5 * p * std::log(M_PI) -
         std::lgamma(0.5 * p / beta) - (0.5 * p / beta) * std::log(2.0);
}

double mggd_log_density(const Vector& z, const Vector& mu, const Matrix& scatter, double beta) {
  if (z.size() != mu.size() || z.size() != scatter.rows())
    throw DimensionMismatch("density argument dimensions disagree");
  const int p = static_cast<int>(z.size());
  LowerFactor c = cholesky(scatter);
  Vector y = c.mat.triangularView<Eigen::Lower>().solve(z - mu);
  const double q = y.squaredNorm();
  const double ld = 2.0 * c.mat.diagonal().array().log().sum();
  return mggd_log_norm_constant(p, beta) - 0.5 * ld - 0.5 * std::pow(q, beta);
}

SampleSet mggd_sample(int n, const Vector& mu, const Matrix& scatter, double beta,
                      std::uint64_t seed) {
  if (beta <= 0) throw InvalidShape("MGGD shape must be positive");
  const int p = static_cast<int>(mu.size());
  if (scatter.rows() != p) throw DimensionMismatch("mu/scatter dimension mismatch");
  LowerFactor a = cholesky(scatter);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::gamma_distribution<double> gamma(0.5 * p / beta, 1.0);

  SampleSet out;
  out.rows.resize(n, p);
  for (int i = 0; i < n; ++i) {
    Vector w(p);
    double norm2;
    do {
      for (int j = 0; j < p; ++j) w[j] = gauss(rng);
      norm2 = w.squaredNorm();
    } while (norm2 == 0.0);
    w /= std::sqrt(norm2);
    const double s = gamma(rng);
    const double r = std::pow(2.0 * s, 0.5 / beta);
    out.rows.row(i) = (mu + r * (a.mat * w)).transpose();
  }
  return out;
}

double covariance_scale(double beta, int p) {
  // Gamma((p+2)/2) = (p/2) Gamma(p/2) makes the Gaussian case exactly 1.
  if (beta == 1.0) return 1.0;
  return std::exp(std::log(2.0) / beta + std::lgamma(0.5 * (p + 2) / beta) -
                  std::lgamma(0.5 * p / beta)) /
         p;
}

}  // namespace rsc
