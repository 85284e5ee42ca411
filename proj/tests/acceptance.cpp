// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria.  The SONAR criterion is skipped (not failed) when the
// dataset file is not present; see README for how to supply it.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "rsc/estimators.hpp"
#include "rsc/experiments.hpp"
#include "rsc/io.hpp"
#include "../tests/test_helpers.hpp"

using namespace rsc;

namespace {

int g_failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<bool(std::ostream&)>& body) {
  std::ostringstream detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name << " ("
            << secs << " s)";
  if (!detail.str().empty()) std::cout << "  -- " << detail.str();
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

Matrix second_moment(const SampleSet& data) {
  return (data.rows.transpose() * data.rows) / data.n();
}

bool criterion1(std::ostream& out) {
  std::mt19937_64 rng(1001);
  SampleSet data = testing::random_samples(100, 10, rng);
  FitReport fp = fit_fixed_point(data, RhoFamily::mggd(1.0), {});
  if (normalized_sq_frobenius_error(fp.scatter, second_moment(data)) >= 1e-20) {
    out << "unconstrained beta=1 fit is not the sample second moment";
    return false;
  }
  SparsityPattern g = banded_pattern(10, 4);
  FitConfig one;
  one.max_iter = 1;
  FitReport mm = fit_chordal_mm(data, RhoFamily::mggd(1.0), g, one);
  LowerFactor mle = solve_weighted_chordal_ggm(data, Vector::Constant(100, 0.5), g);
  Matrix expected = spd_inverse(mle.mat * mle.mat.transpose());
  if ((mm.scatter - expected).norm() >= 1e-10 * expected.norm()) {
    out << "one MM iteration at beta=1 is not the banded Gaussian MLE";
    return false;
  }
  return true;
}

bool criterion2(std::ostream& out) {
  std::mt19937_64 rng(1002);
  const double betas[] = {0.25, 0.5, 1.0, 2.0};
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const double beta = betas[t % 4];
    const int p = 2 + t % 7;
    RhoFamily f = RhoFamily::mggd(beta);
    SampleSet data = testing::random_samples(p + 5, p, rng);
    Matrix s1 = testing::random_spd(p, rng);
    Matrix s2 = testing::random_spd(p, rng);
    const double l1 = neg_log_likelihood(s1, data, f);
    const double l2 = neg_log_likelihood(s2, data, f);
    const double lm = neg_log_likelihood(geodesic_point(s1, s2, 0.5), data, f);
    if (lm > 0.5 * l1 + 0.5 * l2 + 1e-9 * (1 + std::abs(l1) + std::abs(l2))) ++violations;
  }
  out << "1000 midpoint tests, " << violations << " violation(s)";
  return violations == 0;
}

bool criterion3(std::ostream& out) {
  std::mt19937_64 rng(1003);
  const double betas[] = {0.5, 1.0, 2.0};
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const double beta = betas[t % 3];
    const int p = 2 + t % 6;
    RhoFamily f = RhoFamily::mggd(beta);
    SparsityPattern g = testing::random_chordal(p, rng);
    SampleSet data = testing::random_samples(p + 5, p, rng);
    LowerFactor c1 = testing::random_g_sparse_factor(g, rng);
    LowerFactor c2 = testing::random_g_sparse_factor(g, rng);
    LowerFactor mid{0.5 * (c1.mat + c2.mat), g};
    const double o1 = cholesky_objective(c1, data, f);
    const double o2 = cholesky_objective(c2, data, f);
    const double om = cholesky_objective(mid, data, f);
    if (om > 0.5 * o1 + 0.5 * o2 + 1e-9 * (1 + std::abs(o1) + std::abs(o2))) ++violations;
  }
  if (violations != 0) {
    out << violations << " violation(s) at beta >= 0.5";
    return false;
  }

  // The beta >= 0.5 boundary is real: a constructed 1-D instance violates
  // Euclidean midpoint convexity at beta = 0.25.
  RhoFamily f = RhoFamily::mggd(0.25);
  SampleSet one;
  one.rows.resize(1, 1);
  one.rows(0, 0) = 1.0;
  auto obj = [&](double c) {
    Matrix m(1, 1);
    m << c;
    return cholesky_objective(LowerFactor{m, std::nullopt}, one, f);
  };
  const double c1 = 100.0, c2 = 10000.0;
  const bool violated = obj(0.5 * (c1 + c2)) > 0.5 * obj(c1) + 0.5 * obj(c2);
  out << "1000 midpoint tests, 0 violations; beta=0.25 counterexample "
      << (violated ? "violates convexity as expected" : "UNEXPECTEDLY convex");
  return violated;
}

bool criterion4(std::ostream& out) {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  double worst_rel = 0, worst_complete = 0;
  for (int t = 0; t < 200; ++t) {
    const int p = 2 + t % 5;  // p <= 6
    const int n = 5 * p + 10;
    const bool complete = (t % 5 == 0);
    SparsityPattern g = complete ? SparsityPattern::complete(p) : testing::random_chordal(p, rng);
    SampleSet data = testing::random_samples(n, p, rng);
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = unif(rng);

    LowerFactor c = solve_weighted_chordal_ggm(data, w, g);
    Matrix closed = spd_inverse(c.mat * c.mat.transpose());
    GgmSolution sol = solve_weighted_ggm_general(data, w, g, {});
    worst_rel = std::max(worst_rel, (sol.scatter - closed).norm() / closed.norm());

    if (complete) {
      Matrix analytic = Matrix::Zero(p, p);
      for (int i = 0; i < n; ++i)
        analytic += w[i] * data.rows.row(i).transpose() * data.rows.row(i);
      analytic *= 2.0 / n;
      worst_complete =
          std::max(worst_complete, (closed.norm() > 0 ? (closed - analytic).norm() / analytic.norm()
                                                      : 1.0));
    }
  }
  out << "worst closed-form vs gradient rel error " << worst_rel
      << ", worst complete-graph analytic rel error " << worst_complete;
  return worst_rel < 1e-5 && worst_complete < 1e-8;
}

bool criterion5(std::ostream& out) {
  const int p = 10;
  PrecisionModel model = toeplitz_banded_precision(p, 4, 1.0, 0.4);
  SparsityPattern band = banded_pattern(p, 4);

  double worst_agreement = 0;
  int trace_violations = 0;
  for (double beta : {0.5, 1.0}) {
    RhoFamily f = RhoFamily::mggd(beta);
    for (int n : {40, 100}) {
      for (int trial = 0; trial < 100; ++trial) {
        SampleSet data =
            mggd_sample(n, Vector::Zero(p), model.scatter, beta, 50000 + trial);
        FitConfig cfg;
        cfg.max_iter = 300;
        cfg.rel_tol = 1e-12;
        FitReport a = fit_chordal_mm(data, f, band, cfg);
        cfg.init = FitConfig::Init::Given;
        cfg.init_matrix = model.scatter;
        FitReport b = fit_chordal_mm(data, f, band, cfg);
        for (const FitReport* r : {&a, &b})
          for (size_t i = 1; i < r->objective_trace.size(); ++i)
            if (r->objective_trace[i] > r->objective_trace[i - 1] + 1e-10) ++trace_violations;
        worst_agreement =
            std::max(worst_agreement, (a.scatter - b.scatter).norm() / b.scatter.norm());
      }
    }
  }
  out << "worst init agreement " << worst_agreement << ", trace violations "
      << trace_violations;
  const bool ok = worst_agreement < 1e-6 && trace_violations == 0;

  // Empirical record only (no guarantee claimed): beta = 0.2 band, and the
  // 3x3 grid at beta = 0.5.
  {
    RhoFamily f02 = RhoFamily::mggd(0.2);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      SampleSet data = mggd_sample(60, Vector::Zero(p), model.scatter, 0.2, 60000 + trial);
      FitConfig cfg;
      cfg.max_iter = 300;
      cfg.rel_tol = 1e-12;
      FitReport a = fit_chordal_mm(data, f02, band, cfg);
      cfg.init = FitConfig::Init::Given;
      cfg.init_matrix = model.scatter;
      FitReport b = fit_chordal_mm(data, f02, band, cfg);
      worst = std::max(worst, (a.scatter - b.scatter).norm() / b.scatter.norm());
    }
    std::cout << "[INFO] criterion 5 (empirical, no guarantee): beta=0.2 banded worst init "
                 "disagreement "
              << worst << std::endl;
  }
  {
    PrecisionModel grid_model = grid_precision(3, 3, 0.2);
    SparsityPattern grid = grid_pattern(3, 3);
    RhoFamily f = RhoFamily::mggd(0.5);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      SampleSet data =
          mggd_sample(60, Vector::Zero(9), grid_model.scatter, 0.5, 70000 + trial);
      FitConfig cfg;
      cfg.max_iter = 300;
      cfg.rel_tol = 1e-12;
      FitReport a = fit_general_mm(data, f, grid, cfg);
      cfg.init = FitConfig::Init::Given;
      cfg.init_matrix = grid_model.scatter;
      FitReport b = fit_general_mm(data, f, grid, cfg);
      worst = std::max(worst, (a.scatter - b.scatter).norm() / b.scatter.norm());
    }
    std::cout << "[INFO] criterion 5 (empirical, no guarantee): 3x3 grid worst init "
                 "disagreement "
              << worst << std::endl;
  }
  return ok;
}

bool criterion6(std::ostream& out) {
  SyntheticSpec spec;
  spec.p = 10;
  spec.beta = 0.5;
  spec.pattern = banded_pattern(10, 4);
  spec.truth = toeplitz_banded_precision(10, 4, 1.0, 0.4).scatter;
  spec.n_grid = {20, 40, 60, 80, 100};
  spec.trials = 500;
  spec.estimators = {EstimatorKind::SampleCovariance, EstimatorKind::Mggd,
                     EstimatorKind::BMggdIdentityInit};
  spec.seed = 20260826;
  ResultTable t = run_synthetic(spec);

  auto cell = [&](const std::string& est, int n, int col) {
    for (const auto& row : t.rows)
      if (row[0] == est && row[1] == std::to_string(n)) return std::stod(row[col]);
    throw Error("missing row");
  };
  bool ok = true;
  for (int n : spec.n_grid) {
    const double g_mean = cell("G", n, 2), g_se = cell("G", n, 3);
    const double m_mean = cell("MGGD", n, 2), m_se = cell("MGGD", n, 3);
    const double b_mean = cell("BMGGD1", n, 2), b_se = cell("BMGGD1", n, 3);
    const double gap_m = m_mean - b_mean;
    const double gap_g = g_mean - b_mean;
    const bool here = gap_m > 2 * std::sqrt(m_se * m_se + b_se * b_se) &&
                      gap_g > 2 * std::sqrt(g_se * g_se + b_se * b_se);
    out << "n=" << n << " G=" << g_mean << " MGGD=" << m_mean << " BMGGD=" << b_mean
        << (here ? "; " : " [ordering gap too small]; ");
    ok = ok && here;
  }
  return ok;
}

bool criterion7(std::ostream& out) {
  for (int p : {1, 2, 5, 10, 60})
    if (covariance_scale(1.0, p) != 1.0) {
      out << "covariance_scale(1," << p << ") != 1";
      return false;
    }
  const int p = 5;
  std::mt19937_64 rng(1007);
  Matrix s = testing::random_spd(p, rng);
  Vector mu = Vector::Zero(p);

  SampleSet draws = mggd_sample(100000, mu, s, 1.0, 31337);
  Matrix s_inv = spd_inverse(s);
  double mean_r2 = 0;
  for (int i = 0; i < draws.n(); ++i) {
    Vector z = draws.rows.row(i).transpose();
    mean_r2 += z.dot(s_inv * z);
  }
  mean_r2 /= draws.n();
  out << "beta=1 radial mean " << mean_r2 << " (target " << p << ")";
  if (std::abs(mean_r2 - p) / p >= 0.02) return false;

  for (double beta : {0.5, 1.0}) {
    SampleSet d = mggd_sample(100000, mu, s, beta, 424242);
    Matrix emp = (d.rows.transpose() * d.rows) / d.n();
    Matrix expected = covariance_scale(beta, p) * s;
    const double rel = (emp - expected).norm() / expected.norm();
    out << "; beta=" << beta << " cov rel err " << rel;
    if (rel >= 0.05) return false;
  }
  return true;
}

bool criterion8(std::ostream& out) {
  const char* env = std::getenv("RSC_SONAR_DATA");
  std::string path = env ? env : "data/sonar.all-data";
  LabeledDataset data;
  try {
    data = load_sonar(path);
  } catch (const Error&) {
    throw Error("SKIP");  // handled by the caller of this suite
  }
  out << "n=" << data.features.rows();
  SonarConfig cfg;
  ResultTable t = sonar_experiment(data, cfg);
  double sample = 0, naive = 0, bg = 0, bmggd = 0;
  for (const auto& row : t.rows) {
    const double v = std::stod(row[1]);
    if (row[0] == "sample_covariance") sample = v;
    if (row[0] == "naive_bayes") naive = v;
    if (row[0] == "BG") bg = v;
    if (row[0] == "BMGGD") bmggd = v;
  }
  out << "; sample=" << sample << " naive=" << naive << " BG=" << bg << " BMGGD=" << bmggd;
  return std::abs(sample - 0.240) <= 0.03 && std::abs(naive - 0.327) <= 0.03 &&
         std::abs(bg - 0.154) <= 0.03 && std::abs(bmggd - 0.135) <= 0.03 && bmggd <= bg;
}

bool criterion9(std::ostream& out) {
  std::mt19937_64 rng(1009);
  for (int p = 3; p <= 12; ++p) {
    for (int trial = 0; trial < 100; ++trial) {
      SparsityPattern g = testing::random_chordal(p, rng);
      LowerFactor c = testing::random_g_sparse_factor(g, rng);
      Matrix prod = c.mat * c.mat.transpose();
      if (!is_g_sparse(prod, g, 1e-9 * prod.norm())) {
        out << "product pattern violated at p=" << p;
        return false;
      }
      LowerFactor refactored = cholesky(prod);
      if (!is_g_sparse(refactored.mat, g, 1e-9 * refactored.mat.norm())) {
        out << "factorization pattern violated at p=" << p;
        return false;
      }
    }
  }
  for (int p : {3, 6, 10})
    for (int d = 1; d <= p; ++d) {
      EliminationOrder nat;
      nat.order.resize(p);
      for (int i = 0; i < p; ++i) nat.order[i] = i + 1;
      if (!verify_perfect_order(banded_pattern(p, d), nat)) {
        out << "natural order not perfect for band p=" << p << " d=" << d;
        return false;
      }
    }
  SparsityPattern cycle{4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}};
  if (find_perfect_elimination_order(cycle)) {
    out << "4-cycle reported chordal";
    return false;
  }
  if (find_perfect_elimination_order(grid_pattern(3, 3))) {
    out << "3x3 grid reported chordal";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  run_criterion(1, "Gaussian reduction", criterion1);
  run_criterion(2, "geodesic midpoint convexity", criterion2);
  run_criterion(3, "Cholesky-domain convexity with beta boundary", criterion3);
  run_criterion(4, "closed-form vs masked-gradient GGM oracle", criterion4);
  run_criterion(5, "descent and init independence", criterion5);
  run_criterion(6, "synthetic sweep ordering (banded Laplace)", criterion6);
  run_criterion(7, "sampler moments and covariance scale", criterion7);
  // criterion 8 skips without failing when the SONAR file is absent
  {
    std::ostringstream detail;
    bool ok = false, skipped = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criterion8(detail);
    } catch (const Error& e) {
      if (std::string(e.what()) == "SKIP")
        skipped = true;
      else
        detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (skipped) {
      std::cout << "[SKIP] criterion 8: SONAR leave-one-out errors (" << secs
                << " s)  -- dataset file not found; set RSC_SONAR_DATA or place "
                   "data/sonar.all-data (see README)"
                << std::endl;
    } else {
      std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion 8: SONAR leave-one-out errors ("
                << secs << " s)  -- " << detail.str() << std::endl;
      if (!ok) ++g_failures;
    }
  }
  run_criterion(9, "chordal structure suite", criterion9);

  std::cout << (g_failures == 0 ? "all runnable criteria passed"
                                : std::to_string(g_failures) + " criterion(s) failed")
            << std::endl;
  return g_failures;
}
