#include "rsc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <thread>

namespace rsc {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int thread_budget() {
  if (const char* env = std::getenv("ROBUST_SCATTER_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Deterministic parallel loop: body(i) for i in [0, count); results must be
/// written to preallocated slots indexed by i.
template <typename Body>
void parallel_for(int count, const Body& body) {
  const int threads = std::min(thread_budget(), count > 0 ? count : 1);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::string ResultTable::to_csv() const {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? "," : "\n";
  }
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

PrecisionModel toeplitz_banded_precision(int p, int width, double diag, double offdiag) {
  Matrix k = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    k(i, i) = diag;
    for (int j = i + 1; j < p && j - i < width; ++j) {
      k(i, j) = offdiag;
      k(j, i) = offdiag;
    }
  }
  return PrecisionModel{k, spd_inverse(k)};  // throws NotPositiveDefinite if inadmissible
}

PrecisionModel grid_precision(int rows, int cols, double offdiag) {
  SparsityPattern g = grid_pattern(rows, cols);
  int max_degree = 0;
  std::vector<int> deg(g.p + 1, 0);
  for (const auto& [a, b] : g.edges) {
    max_degree = std::max({max_degree, ++deg[a], ++deg[b]});
  }
  if (!(std::abs(offdiag) * max_degree < 1.0))
    throw NotDiagonallyDominant("|offdiag| * max degree must be < 1");
  Matrix k = Matrix::Identity(g.p, g.p);
  for (const auto& [a, b] : g.edges) {
    k(a - 1, b - 1) = offdiag;
    k(b - 1, a - 1) = offdiag;
  }
  return PrecisionModel{k, spd_inverse(k)};
}

std::string estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::SampleCovariance: return "G";
    case EstimatorKind::BandedGaussian: return "BG";
    case EstimatorKind::Mggd: return "MGGD";
    case EstimatorKind::BMggdIdentityInit: return "BMGGD1";
    case EstimatorKind::BMggdTruthInit: return "BMGGD2";
  }
  return "?";
}

namespace {

bool natural_order_perfect(const SparsityPattern& g) {
  EliminationOrder nat;
  nat.order.resize(g.p);
  std::iota(nat.order.begin(), nat.order.end(), 1);
  return verify_perfect_order(g, nat);
}

Matrix constrained_fit(const SampleSet& data, const RhoFamily& f, const SparsityPattern& g,
                       const FitConfig& cfg) {
  if (natural_order_perfect(g) || find_perfect_elimination_order(g))
    return fit_chordal_mm(data, f, g, cfg).scatter;
  return fit_general_mm(data, f, g, cfg).scatter;
}

}  // namespace

ResultTable run_synthetic(const SyntheticSpec& spec) {
  const int p = spec.p;
  const Vector zero_mean = Vector::Zero(p);
  const double scale = covariance_scale(spec.beta, p);
  const RhoFamily rho = RhoFamily::mggd(spec.beta);
  const RhoFamily gauss = RhoFamily::mggd(1.0);

  const int n_count = static_cast<int>(spec.n_grid.size());
  const int e_count = static_cast<int>(spec.estimators.size());

  // err[trial][n_idx][e_idx]; NaN marks a failed trial.
  struct Cell {
    double corrected = std::numeric_limits<double>::quiet_NaN();
    double uncorrected = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<std::vector<std::vector<Cell>>> err(
      spec.trials, std::vector<std::vector<Cell>>(n_count, std::vector<Cell>(e_count)));

  parallel_for(spec.trials, [&](int t) {
    const std::uint64_t trial_seed = spec.seed + static_cast<std::uint64_t>(t);
    for (int ni = 0; ni < n_count; ++ni) {
      const int n = spec.n_grid[ni];
      SampleSet data =
          mggd_sample(n, zero_mean, spec.truth, spec.beta, splitmix64(trial_seed * 1000003ULL + ni));
      for (int ei = 0; ei < e_count; ++ei) {
        try {
          Matrix est;
          bool gaussian_family = false;
          FitConfig cfg;
          cfg.max_iter = spec.max_iter;
          switch (spec.estimators[ei]) {
            case EstimatorKind::SampleCovariance:
              est = (data.rows.transpose() * data.rows) / n;
              gaussian_family = true;
              break;
            case EstimatorKind::BandedGaussian:
              est = constrained_fit(data, gauss, spec.pattern, cfg);
              gaussian_family = true;
              break;
            case EstimatorKind::Mggd:
              est = fit_fixed_point(data, rho, cfg).scatter;
              break;
            case EstimatorKind::BMggdIdentityInit:
              est = constrained_fit(data, rho, spec.pattern, cfg);
              break;
            case EstimatorKind::BMggdTruthInit:
              cfg.init = FitConfig::Init::Given;
              cfg.init_matrix = spec.truth;
              est = constrained_fit(data, rho, spec.pattern, cfg);
              break;
          }
          err[t][ni][ei].uncorrected = normalized_sq_frobenius_error(est, spec.truth);
          err[t][ni][ei].corrected = normalized_sq_frobenius_error(
              gaussian_family ? Matrix(est / scale) : est, spec.truth);
        } catch (const Error&) {
          // failed trial: left as NaN and reported in the failures column
        }
      }
    }
  });

  ResultTable table;
  table.header = {"estimator", "n", "mean_error", "stderr", "trials",
                  "mean_error_uncorrected", "failures"};
  for (int ei = 0; ei < e_count; ++ei) {
    for (int ni = 0; ni < n_count; ++ni) {
      double sum = 0, sum_sq = 0, sum_unc = 0;
      int ok = 0;
      for (int t = 0; t < spec.trials; ++t) {
        const Cell& c = err[t][ni][ei];
        if (std::isnan(c.corrected)) continue;
        sum += c.corrected;
        sum_sq += c.corrected * c.corrected;
        sum_unc += c.uncorrected;
        ++ok;
      }
      const double mean = ok ? sum / ok : 0.0;
      const double var = ok > 1 ? (sum_sq - ok * mean * mean) / (ok - 1) : 0.0;
      const double se = ok > 1 ? std::sqrt(std::max(var, 0.0) / ok) : 0.0;
      table.rows.push_back({estimator_name(spec.estimators[ei]), std::to_string(spec.n_grid[ni]),
                            fmt17(mean), fmt17(se), std::to_string(ok),
                            fmt17(ok ? sum_unc / ok : 0.0), std::to_string(spec.trials - ok)});
    }
  }
  return table;
}

int qda_classify(const std::vector<ClassModel>& models, const Vector& x) {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < models.size(); ++c) {
    const ClassModel& m = models[c];
    LowerFactor chol_cov = cholesky(m.covariance);
    Vector y = chol_cov.mat.triangularView<Eigen::Lower>().solve(x - m.mean);
    const double score = std::log(m.prior) - chol_cov.mat.diagonal().array().log().sum() -
                         0.5 * y.squaredNorm();
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace {

SampleSet subset_rows(const Matrix& features, const std::vector<int>& idx) {
  SampleSet s;
  s.rows.resize(idx.size(), features.cols());
  for (size_t k = 0; k < idx.size(); ++k) s.rows.row(k) = features.row(idx[k]);
  return s;
}

SampleSet center(const SampleSet& s, const Vector& mu) {
  SampleSet out;
  out.rows = s.rows.rowwise() - mu.transpose();
  return out;
}

double gaussian_loglik(const SampleSet& val, const Vector& mu, const Matrix& cov) {
  double ll = 0;
  for (int i = 0; i < val.n(); ++i)
    ll += mggd_log_density(val.rows.row(i).transpose(), mu, cov, 1.0);
  return ll;
}

double mggd_loglik(const SampleSet& val, const Vector& mu, const Matrix& scatter, double beta) {
  double ll = 0;
  for (int i = 0; i < val.n(); ++i)
    ll += mggd_log_density(val.rows.row(i).transpose(), mu, scatter, beta);
  return ll;
}

struct ClassHyper {
  int bandwidth = 4;
  double beta = 1.0;
};

/// Per-class selection of the band (by Gaussian validation likelihood) and
/// beta (by MGGD validation likelihood with that band), over random
/// 2/3-1/3 splits of the class samples.
ClassHyper select_hyper(const SampleSet& class_data, const SonarConfig& cfg,
                        std::uint64_t seed) {
  const int n = class_data.n();
  const int p = class_data.p();
  const int n_train = 2 * n / 3;

  std::vector<std::vector<int>> train_sets(cfg.selection_splits), val_sets(cfg.selection_splits);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < cfg.selection_splits; ++s) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    train_sets[s].assign(perm.begin(), perm.begin() + n_train);
    val_sets[s].assign(perm.begin() + n_train, perm.end());
  }

  ClassHyper best;
  FitConfig fit_cfg;
  fit_cfg.max_iter = cfg.max_iter;
  const RhoFamily gauss = RhoFamily::mggd(1.0);

  double best_ll = -std::numeric_limits<double>::infinity();
  for (int d : cfg.bandwidths) {
    if (d > p) continue;
    SparsityPattern g = banded_pattern(p, d);
    double ll = 0;
    try {
      for (int s = 0; s < cfg.selection_splits; ++s) {
        SampleSet train = subset_rows(class_data.rows, train_sets[s]);
        SampleSet val = subset_rows(class_data.rows, val_sets[s]);
        Vector mu = train.rows.colwise().mean().transpose();
        Matrix cov = fit_chordal_mm(center(train, mu), gauss, g, fit_cfg).scatter;
        ll += gaussian_loglik(val, mu, cov);
      }
    } catch (const Error&) {
      continue;
    }
    if (ll > best_ll) {
      best_ll = ll;
      best.bandwidth = d;
    }
  }

  SparsityPattern g = banded_pattern(p, best.bandwidth);
  best_ll = -std::numeric_limits<double>::infinity();
  for (double beta : cfg.betas) {
    const RhoFamily rho = RhoFamily::mggd(beta);
    double ll = 0;
    try {
      for (int s = 0; s < cfg.selection_splits; ++s) {
        SampleSet train = subset_rows(class_data.rows, train_sets[s]);
        SampleSet val = subset_rows(class_data.rows, val_sets[s]);
        Vector mu = train.rows.colwise().mean().transpose();
        Matrix scatter = fit_chordal_mm(center(train, mu), rho, g, fit_cfg).scatter;
        ll += mggd_loglik(val, mu, scatter, beta);
      }
    } catch (const Error&) {
      continue;
    }
    if (ll > best_ll) {
      best_ll = ll;
      best.beta = beta;
    }
  }
  return best;
}

}  // namespace

ResultTable sonar_experiment(const LabeledDataset& data, const SonarConfig& cfg) {
  const int n = static_cast<int>(data.features.rows());
  const int p = static_cast<int>(data.features.cols());
  if (static_cast<int>(data.labels.size()) != n)
    throw DataShapeMismatch("label count does not match feature rows");
  const int n_classes =
      data.labels.empty() ? 0 : *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  if (n_classes < 2) throw DataShapeMismatch("need at least two classes");

  std::vector<std::vector<int>> class_idx(n_classes);
  for (int i = 0; i < n; ++i) class_idx[data.labels[i]].push_back(i);

  // Band and beta are selected once per class on the full data; the
  // leave-one-out loop refits the covariances with them held fixed.
  std::vector<ClassHyper> hyper(n_classes);
  for (int c = 0; c < n_classes; ++c)
    hyper[c] = select_hyper(subset_rows(data.features, class_idx[c]), cfg,
                            splitmix64(cfg.seed + 7919ULL * c));

  const std::vector<std::string> methods = {"sample_covariance", "naive_bayes", "BG", "BMGGD"};
  std::vector<std::vector<int>> wrong(4, std::vector<int>(n, 0));

  FitConfig fit_cfg;
  fit_cfg.max_iter = cfg.max_iter;
  const RhoFamily gauss = RhoFamily::mggd(1.0);

  parallel_for(n, [&](int left_out) {
    std::vector<ClassModel> sample_models(n_classes), naive_models(n_classes),
        bg_models(n_classes), bmggd_models(n_classes);
    for (int c = 0; c < n_classes; ++c) {
      std::vector<int> train_idx;
      for (int i : class_idx[c])
        if (i != left_out) train_idx.push_back(i);
      SampleSet train = subset_rows(data.features, train_idx);
      Vector mu = train.rows.colwise().mean().transpose();
      SampleSet centered = center(train, mu);
      const double prior =
          static_cast<double>(train_idx.size()) / static_cast<double>(n - 1);

      Matrix sample_cov = (centered.rows.transpose() * centered.rows) / centered.n();
      sample_models[c] = {mu, sample_cov, prior};
      naive_models[c] = {mu, Matrix(sample_cov.diagonal().asDiagonal()), prior};

      SparsityPattern g = banded_pattern(p, hyper[c].bandwidth);
      bg_models[c] = {mu, fit_chordal_mm(centered, gauss, g, fit_cfg).scatter, prior};

      const RhoFamily rho = RhoFamily::mggd(hyper[c].beta);
      Matrix scatter = fit_chordal_mm(centered, rho, g, fit_cfg).scatter;
      bmggd_models[c] = {mu, Matrix(covariance_scale(hyper[c].beta, p) * scatter), prior};
    }
    const Vector x = data.features.row(left_out).transpose();
    const int truth = data.labels[left_out];
    wrong[0][left_out] = qda_classify(sample_models, x) != truth;
    wrong[1][left_out] = qda_classify(naive_models, x) != truth;
    wrong[2][left_out] = qda_classify(bg_models, x) != truth;
    wrong[3][left_out] = qda_classify(bmggd_models, x) != truth;
  });

  ResultTable table;
  table.header = {"method", "loo_error"};
  for (size_t m = 0; m < methods.size(); ++m) {
    const int total = std::accumulate(wrong[m].begin(), wrong[m].end(), 0);
    table.rows.push_back({methods[m], fmt17(static_cast<double>(total) / n)});
  }
  return table;
}

}  // namespace rsc
