#include "rsc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include <json.hpp>

namespace rsc {

namespace {

constexpr int kInnerMaxIter = 50000;

EliminationOrder natural_order(int p) {
  EliminationOrder ord;
  ord.order.resize(p);
  std::iota(ord.order.begin(), ord.order.end(), 1);
  return ord;
}

void check_span(const SampleSet& data) {
  Eigen::ColPivHouseholderQR<Matrix> qr(data.rows);
  if (qr.rank() < data.p()) throw RankDeficientData();
}

Matrix initial_scatter(const SampleSet& data, const FitConfig& cfg) {
  const int p = data.p();
  switch (cfg.init) {
    case FitConfig::Init::Identity:
      return Matrix::Identity(p, p);
    case FitConfig::Init::Given:
      if (cfg.init_matrix.rows() != p) throw DimensionMismatch("init matrix has wrong size");
      return cfg.init_matrix;
    case FitConfig::Init::SampleCovariance:
      return (data.rows.transpose() * data.rows) / data.n();
  }
  return Matrix::Identity(p, p);
}

/// q_i = z_i^T S^{-1} z_i for all samples, via one Cholesky of S.
Vector quad_forms(const Matrix& scatter, const SampleSet& data) {
  LowerFactor c = cholesky(scatter);
  Vector q(data.n());
  for (int i = 0; i < data.n(); ++i) {
    q[i] = c.mat.triangularView<Eigen::Lower>()
               .solve(data.rows.row(i).transpose())
               .squaredNorm();
  }
  return q;
}

Vector iteration_weights(const Vector& q, const RhoFamily& f, double clamp) {
  Vector w(q.size());
  for (int i = 0; i < q.size(); ++i) {
    w[i] = f.u(std::max(q[i], clamp));
    if (!std::isfinite(w[i])) throw DivergedWeights();
  }
  return w;
}

SampleSet drop_zero_rows(const SampleSet& data) {
  std::vector<int> keep;
  for (int i = 0; i < data.n(); ++i)
    if (data.rows.row(i).squaredNorm() > 0) keep.push_back(i);
  if (static_cast<int>(keep.size()) == data.n()) return data;
  std::cerr << "warning: dropping " << data.n() - keep.size()
            << " zero sample(s) for Tyler estimation\n";
  SampleSet out;
  out.rows.resize(keep.size(), data.p());
  for (size_t k = 0; k < keep.size(); ++k) out.rows.row(k) = data.rows.row(keep[k]);
  return out;
}

Matrix pattern_mask(const SparsityPattern& g) {
  Matrix m = Matrix::Identity(g.p, g.p);
  for (const auto& [a, b] : g.edges) {
    m(a - 1, b - 1) = 1.0;
    m(b - 1, a - 1) = 1.0;
  }
  return m;
}

bool is_spd(const Matrix& m) {
  try {
    cholesky(m);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

}  // namespace

std::string FitReport::to_json() const {
  nlohmann::json j;
  const int p = static_cast<int>(scatter.rows());
  std::vector<double> flat;
  flat.reserve(p * p);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < p; ++k) flat.push_back(scatter(i, k));
  j["p"] = p;
  j["scatter"] = flat;
  j["objective_trace"] = objective_trace;
  j["iterations"] = iterations;
  j["converged"] = converged;
  return j.dump();
}

FitReport fit_fixed_point(const SampleSet& raw, const RhoFamily& f, const FitConfig& cfg) {
  SampleSet data = f.kind == RhoFamily::Kind::Tyler ? drop_zero_rows(raw) : raw;
  check_span(data);
  const int n = data.n();
  const int p = data.p();

  FitReport report;
  Matrix scatter = initial_scatter(data, cfg);
  report.objective_trace.push_back(neg_log_likelihood(scatter, data, f));
  for (int m = 1; m <= cfg.max_iter; ++m) {
    Vector q = quad_forms(scatter, data);
    Vector w = iteration_weights(q, f, cfg.quad_clamp);
    Matrix next = Matrix::Zero(p, p);
    for (int i = 0; i < n; ++i)
      next += w[i] * data.rows.row(i).transpose() * data.rows.row(i);
    next *= 2.0 / n;
    if (f.kind == RhoFamily::Kind::Tyler) next *= p / next.trace();

    const double rel = (next - scatter).norm() / scatter.norm();
    scatter = next;
    report.objective_trace.push_back(neg_log_likelihood(scatter, data, f));
    report.iterations = m;
    if (rel < cfg.rel_tol) {
      report.converged = true;
      break;
    }
  }
  report.scatter = scatter;
  return report;
}

LowerFactor solve_weighted_chordal_ggm(const SampleSet& data, const WeightVector& w,
                                       const SparsityPattern& g) {
  const int n = data.n();
  const int p = data.p();
  if (g.p != p) throw DimensionMismatch("pattern/data dimension mismatch");
  if (w.size() != n) throw DimensionMismatch("weight/sample count mismatch");
  if (!verify_perfect_order(g, natural_order(p))) throw NotPerfectOrder();

  Matrix weighted = data.rows;
  for (int i = 0; i < n; ++i) weighted.row(i) *= std::sqrt(std::max(w[i], 0.0));

  Matrix c = Matrix::Zero(p, p);
  for (int j = 1; j <= p; ++j) {
    std::vector<int> later;
    for (int k = j + 1; k <= p; ++k)
      if (g.has_edge(j, k)) later.push_back(k);

    double rss;
    Vector coef;
    if (later.empty()) {
      rss = weighted.col(j - 1).squaredNorm();
    } else {
      Matrix x(n, later.size());
      for (size_t k = 0; k < later.size(); ++k) x.col(k) = weighted.col(later[k] - 1);
      Eigen::ColPivHouseholderQR<Matrix> qr(x);
      if (qr.rank() < static_cast<Eigen::Index>(later.size()))
        throw RankDeficientData("singular regression in chordal GGM solve");
      coef = qr.solve(weighted.col(j - 1));
      rss = (weighted.col(j - 1) - x * coef).squaredNorm();
    }
    if (!(rss > 0)) throw RankDeficientData("zero residual in chordal GGM solve");

    const double cjj = std::sqrt(n / (2.0 * rss));
    c(j - 1, j - 1) = cjj;
    for (size_t k = 0; k < later.size(); ++k) c(later[k] - 1, j - 1) = -cjj * coef[k];
  }
  return LowerFactor{std::move(c), g};
}

namespace {

struct Relabeling {
  std::vector<int> to_new;  // 1-based old -> new
  std::vector<int> to_old;  // 1-based new -> old
};

Relabeling relabeling_from(const EliminationOrder& ord) {
  const int p = static_cast<int>(ord.order.size());
  Relabeling r;
  r.to_new.assign(p + 1, 0);
  r.to_old.assign(p + 1, 0);
  for (int k = 0; k < p; ++k) {
    r.to_new[ord.order[k]] = k + 1;
    r.to_old[k + 1] = ord.order[k];
  }
  return r;
}

}  // namespace

FitReport fit_chordal_mm(const SampleSet& data, const RhoFamily& f, const SparsityPattern& g,
                         const FitConfig& cfg) {
  const int p = data.p();
  if (g.p != p) throw DimensionMismatch("pattern/data dimension mismatch");

  if (!verify_perfect_order(g, natural_order(p))) {
    auto ord = find_perfect_elimination_order(g);
    if (!ord) throw NonChordalPattern();
    // Relabel so the perfect order becomes natural, solve, undo.
    Relabeling rel = relabeling_from(*ord);
    SampleSet permuted;
    permuted.rows.resize(data.n(), p);
    for (int k = 1; k <= p; ++k) permuted.rows.col(k - 1) = data.rows.col(rel.to_old[k] - 1);
    FitConfig sub = cfg;
    if (cfg.init == FitConfig::Init::Given) {
      sub.init_matrix.resize(p, p);
      for (int a = 1; a <= p; ++a)
        for (int b = 1; b <= p; ++b)
          sub.init_matrix(a - 1, b - 1) = cfg.init_matrix(rel.to_old[a] - 1, rel.to_old[b] - 1);
    }
    FitReport inner = fit_chordal_mm(permuted, f, permute_pattern(g, *ord), sub);
    FitReport report = inner;
    report.factor.reset();
    for (int a = 1; a <= p; ++a)
      for (int b = 1; b <= p; ++b)
        report.scatter(rel.to_old[a] - 1, rel.to_old[b] - 1) = inner.scatter(a - 1, b - 1);
    return report;
  }

  check_span(data);
  FitReport report;
  Matrix scatter = initial_scatter(data, cfg);
  report.objective_trace.push_back(neg_log_likelihood(scatter, data, f));
  LowerFactor factor{Matrix::Identity(p, p), g};
  for (int m = 1; m <= cfg.max_iter; ++m) {
    Vector q = quad_forms(scatter, data);
    Vector alpha = iteration_weights(q, f, cfg.quad_clamp);
    factor = solve_weighted_chordal_ggm(data, alpha, g);
    Matrix next = spd_inverse(factor.mat * factor.mat.transpose());

    const double rel = (next - scatter).norm() / scatter.norm();
    scatter = next;
    report.objective_trace.push_back(neg_log_likelihood(scatter, data, f));
    report.iterations = m;
    if (rel < cfg.rel_tol) {
      report.converged = true;
      break;
    }
  }
  report.scatter = scatter;
  report.factor = std::move(factor);
  return report;
}

GgmSolution solve_weighted_ggm_general(const SampleSet& data, const WeightVector& w,
                                       const SparsityPattern& g, const FitConfig& cfg,
                                       const Matrix* warm_start) {
  const int n = data.n();
  const int p = data.p();
  if (g.p != p) throw DimensionMismatch("pattern/data dimension mismatch");

  Matrix m = Matrix::Zero(p, p);
  for (int i = 0; i < n; ++i)
    m += std::max(w[i], 0.0) * data.rows.row(i).transpose() * data.rows.row(i);

  const Matrix mask = pattern_mask(g);
  Matrix conc;
  if (warm_start) {
    conc = *warm_start;
  } else {
    // Diagonal start is always pattern-feasible.
    conc = Matrix::Zero(p, p);
    for (int j = 0; j < p; ++j) {
      if (!(m(j, j) > 0)) throw RankDeficientData("zero weighted column norm");
      conc(j, j) = 0.5 * n / m(j, j);
    }
  }

  auto objective = [&](const Matrix& k) { return (k.cwiseProduct(m)).sum() - 0.5 * n * log_det(k); };

  GgmSolution sol;
  double obj = objective(conc);
  double step = 1.0 / (m.norm() + 1.0);
  const double grad_tol = 1e-7 * n;
  for (int it = 1; it <= kInnerMaxIter; ++it) {
    Matrix grad = (m - 0.5 * n * spd_inverse(conc)).cwiseProduct(mask);
    sol.iterations = it;
    if (grad.cwiseAbs().maxCoeff() < grad_tol) {
      sol.converged = true;
      break;
    }
    const double gsq = grad.squaredNorm();
    double t = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Matrix cand = conc - t * grad;
      if (is_spd(cand)) {
        const double cand_obj = objective(cand);
        if (cand_obj <= obj - 1e-4 * t * gsq) {
          conc = std::move(cand);
          obj = cand_obj;
          step = t * 2.0;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;  // line search stalled at numerical precision
  }
  sol.scatter = spd_inverse(conc);
  return sol;
}

FitReport fit_general_mm(const SampleSet& data, const RhoFamily& f, const SparsityPattern& g,
                         const FitConfig& cfg) {
  check_span(data);
  const int p = data.p();
  if (g.p != p) throw DimensionMismatch("pattern/data dimension mismatch");

  FitReport report;
  Matrix scatter = initial_scatter(data, cfg);
  report.objective_trace.push_back(neg_log_likelihood(scatter, data, f));
  bool inner_ok = true;
  for (int m = 1; m <= cfg.max_iter; ++m) {
    Vector q = quad_forms(scatter, data);
    Vector alpha = iteration_weights(q, f, cfg.quad_clamp);
    Matrix warm = spd_inverse(scatter).cwiseProduct(pattern_mask(g));
    if (!is_spd(warm)) {
      GgmSolution cold = solve_weighted_ggm_general(data, alpha, g, cfg);
      inner_ok = inner_ok && cold.converged;
      warm = spd_inverse(cold.scatter);
    }
    GgmSolution sol = solve_weighted_ggm_general(data, alpha, g, cfg, &warm);
    inner_ok = inner_ok && sol.converged;

    const double rel = (sol.scatter - scatter).norm() / scatter.norm();
    scatter = sol.scatter;
    report.objective_trace.push_back(neg_log_likelihood(scatter, data, f));
    report.iterations = m;
    if (rel < cfg.rel_tol) {
      report.converged = inner_ok;
      break;
    }
  }
  report.scatter = scatter;
  return report;
}

namespace {

/// Gradient of sum_i rho(||C^T z_i||^2) w.r.t. C is 2 * (sum_i u_i z_i z_i^T) * C.
Matrix smooth_gradient(const Matrix& c, const SampleSet& data, const RhoFamily& f,
                       double clamp) {
  const int n = data.n();
  const int p = data.p();
  Matrix mu = Matrix::Zero(p, p);
  for (int i = 0; i < n; ++i) {
    const double q = (c.transpose() * data.rows.row(i).transpose()).squaredNorm();
    mu += f.u(std::max(q, clamp)) * data.rows.row(i).transpose() * data.rows.row(i);
  }
  return 2.0 * mu * c;
}

}  // namespace

FitReport fit_direct_cholesky(const SampleSet& data, const RhoFamily& f,
                              const SparsityPattern& g, const FitConfig& cfg) {
  const int n = data.n();
  const int p = data.p();
  if (g.p != p) throw DimensionMismatch("pattern/data dimension mismatch");
  if (!f.rho_sq_convex())
    throw DomainError("fit_direct_cholesky requires rho(x^2) convex (MGGD beta >= 0.5)");
  if (!verify_perfect_order(g, natural_order(p))) throw NotPerfectOrder();
  check_span(data);

  // Free entries: diagonal plus below-diagonal pattern positions.
  Matrix mask = Matrix::Zero(p, p);
  for (int i = 1; i <= p; ++i)
    for (int j = 1; j <= i; ++j)
      if (i == j || g.has_edge(i, j)) mask(i - 1, j - 1) = 1.0;

  LowerFactor c{Matrix::Identity(p, p), g};
  auto objective = [&](const LowerFactor& lf) { return cholesky_objective(lf, data, f); };

  FitReport report;
  double obj = objective(c);
  report.objective_trace.push_back(obj);
  double step = 1.0;
  const double grad_tol = 1e-8 * n;
  bool converged = false;
  for (int it = 1; it <= kInnerMaxIter; ++it) {
    Matrix grad = smooth_gradient(c.mat, data, f, cfg.quad_clamp);
    grad.diagonal() -= (n * c.mat.diagonal().cwiseInverse());
    grad = grad.cwiseProduct(mask);
    report.iterations = it;
    if (grad.cwiseAbs().maxCoeff() < grad_tol) {
      converged = true;
      break;
    }
    const double gsq = grad.squaredNorm();
    double t = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      LowerFactor cand{c.mat - t * grad, g};
      cand.mat.diagonal() = cand.mat.diagonal().cwiseMax(1e-10);
      const double cand_obj = objective(cand);
      if (std::isfinite(cand_obj) && cand_obj <= obj - 1e-4 * t * gsq) {
        c = std::move(cand);
        obj = cand_obj;
        step = t * 2.0;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    report.objective_trace.push_back(obj);
    if (!accepted) {
      converged = true;  // stalled at numerical precision
      break;
    }
  }
  report.converged = converged;
  report.scatter = spd_inverse(c.mat * c.mat.transpose());
  report.factor = std::move(c);
  if (!converged) throw MaxIterExceeded("fit_direct_cholesky did not reach tolerance");
  return report;
}

FitReport fit_l1_cholesky(const SampleSet& data, const RhoFamily& f, double lambda,
                          const FitConfig& cfg) {
  const int n = data.n();
  const int p = data.p();
  if (lambda < 0) throw DomainError("lambda must be nonnegative");
  if (!f.rho_sq_convex())
    throw DomainError("fit_l1_cholesky requires rho(x^2) convex (MGGD beta >= 0.5)");
  check_span(data);

  Matrix lower_mask = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) lower_mask(i, j) = 1.0;

  auto total = [&](const Matrix& c) {
    return cholesky_objective(LowerFactor{c, std::nullopt}, data, f) +
           lambda * c.cwiseAbs().sum();
  };
  auto smooth = [&](const Matrix& c) {
    return cholesky_objective(LowerFactor{c, std::nullopt}, data, f);
  };

  Matrix c = Matrix::Identity(p, p);
  FitReport report;
  double obj = total(c);
  report.objective_trace.push_back(obj);
  double step = 1.0 / n;
  bool converged = false;
  for (int it = 1; it <= kInnerMaxIter; ++it) {
    Matrix grad = smooth_gradient(c, data, f, cfg.quad_clamp);
    grad.diagonal() -= (n * c.diagonal().cwiseInverse());
    grad = grad.cwiseProduct(lower_mask);
    report.iterations = it;

    const double smooth_here = smooth(c);
    double t = step;
    Matrix cand;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      cand = c - t * grad;
      // soft threshold on every free entry, then keep the diagonal positive
      for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
          const double v = cand(i, j);
          cand(i, j) = std::copysign(std::max(std::abs(v) - t * lambda, 0.0), v);
        }
      cand.diagonal() = cand.diagonal().cwiseMax(1e-10);
      const Matrix diff = cand - c;
      const double model = smooth_here + grad.cwiseProduct(diff).sum() +
                           diff.squaredNorm() / (2.0 * t);
      const double cand_smooth = smooth(cand);
      if (std::isfinite(cand_smooth) && cand_smooth <= model + 1e-12 * (1.0 + std::abs(model))) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    const double rel = (cand - c).norm() / std::max(c.norm(), 1e-300);
    c = cand;
    const double prev_obj = obj;
    obj = total(c);
    report.objective_trace.push_back(obj);
    step = t * 1.5;
    if (rel < cfg.rel_tol ||
        std::abs(prev_obj - obj) < 1e-14 * (1.0 + std::abs(prev_obj))) {
      converged = true;
      break;
    }
  }
  report.converged = converged;
  report.scatter = spd_inverse(c * c.transpose());
  report.factor = LowerFactor{std::move(c), std::nullopt};
  if (!converged) throw MaxIterExceeded("fit_l1_cholesky did not reach tolerance");
  return report;
}

JointFit fit_chordal_joint_mean(const SampleSet& data, const RhoFamily& f,
                                const SparsityPattern& g, const FitConfig& cfg) {
  const int n = data.n();
  const int p = data.p();
  if (g.p != p) throw DimensionMismatch("pattern/data dimension mismatch");

  Vector mean = data.rows.colwise().mean().transpose();
  Matrix scatter = Matrix::Identity(p, p);
  if (cfg.init == FitConfig::Init::Given) scatter = cfg.init_matrix;

  auto centered_at = [&](const Vector& mu) {
    SampleSet c;
    c.rows = data.rows.rowwise() - mu.transpose();
    return c;
  };
  auto joint_objective = [&](const Vector& mu, const Matrix& s) {
    return neg_log_likelihood(s, centered_at(mu), f);
  };

  JointFit out;
  out.report.objective_trace.push_back(joint_objective(mean, scatter));
  for (int m = 1; m <= cfg.max_iter; ++m) {
    // center step
    Vector q = quad_forms(scatter, centered_at(mean));
    Vector w = iteration_weights(q, f, cfg.quad_clamp);
    Vector next_mean = (data.rows.transpose() * w) / w.sum();

    // scatter step on freshly centered data
    SampleSet centered = centered_at(next_mean);
    check_span(centered);
    Vector q2 = quad_forms(scatter, centered);
    Vector alpha = iteration_weights(q2, f, cfg.quad_clamp);
    LowerFactor factor = solve_weighted_chordal_ggm(centered, alpha, g);
    Matrix next = spd_inverse(factor.mat * factor.mat.transpose());

    const double rel_s = (next - scatter).norm() / scatter.norm();
    const double rel_m = (next_mean - mean).norm() / std::max(mean.norm(), 1.0);
    mean = next_mean;
    scatter = next;
    out.report.objective_trace.push_back(joint_objective(mean, scatter));
    out.report.iterations = m;
    out.report.factor = std::move(factor);
    if (rel_s < cfg.rel_tol && rel_m < cfg.rel_tol) {
      out.report.converged = true;
      break;
    }
  }
  out.report.scatter = scatter;
  out.mean = mean;
  return out;
}

}  // namespace rsc
