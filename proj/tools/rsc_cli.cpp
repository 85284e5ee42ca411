// Command-line front end for the scatter estimation library.
//
// Subcommands:
//   sample    draw from a multivariate generalized Gaussian, write CSV
//   fit       fit one estimator to a CSV sample, write a JSON report
//   exp1      synthetic sweep: banded truth, beta = 0.5
//   exp2      synthetic sweep: banded truth, beta = 0.2
//   exp3      synthetic sweep: 3x3 grid truth, beta = 0.5
//   sonar     leave-one-out classification table on the SONAR dataset
//   selftest  compact invariant check
//
// All randomness is seeded: the per-trial seed of an experiment is the master
// seed plus the trial index, so runs with equal config are byte-identical.
//
// Exit codes: 0 success, 2 bad usage/config, 3 parse error in an input file,
// 4 data shape problem, 5 numerical failure, 6 sparsity pattern problem,
// 1 other error.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsc/estimators.hpp"
#include "rsc/experiments.hpp"
#include "rsc/io.hpp"

using namespace rsc;
using nlohmann::json;

namespace {

struct UsageError : Error {
  using Error::Error;
};

// "full" | "banded:d" | "grid:r,c" | path to a JSON edge-list file
SparsityPattern parse_pattern(const std::string& spec, int p) {
  if (spec == "full") return SparsityPattern::complete(p);
  if (spec.rfind("banded:", 0) == 0) return banded_pattern(p, std::stoi(spec.substr(7)));
  if (spec.rfind("grid:", 0) == 0) {
    const auto comma = spec.find(',', 5);
    if (comma == std::string::npos) throw UsageError("grid pattern needs rows,cols");
    SparsityPattern g =
        grid_pattern(std::stoi(spec.substr(5, comma - 5)), std::stoi(spec.substr(comma + 1)));
    if (g.p != p) throw DimensionMismatch("grid pattern dimension does not match data");
    return g;
  }
  std::ifstream in(spec);
  if (!in) throw UsageError("cannot open pattern file: " + spec);
  SparsityPattern g = SparsityPattern::from_json(json::parse(in));
  if (g.p != p) throw DimensionMismatch("pattern dimension does not match data");
  return g;
}

RhoFamily parse_rho(const std::string& name, double beta, double huber_threshold, int p) {
  if (name == "mggd") return RhoFamily::mggd(beta);
  if (name == "tyler") return RhoFamily::tyler(p);
  if (name == "huber") return RhoFamily::huber(huber_threshold);
  throw UsageError("unknown rho family: " + name);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

// Overlay a JSON config file onto already-registered CLI11 options, rejecting
// keys that don't correspond to any option of the subcommand.
void apply_config(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("unknown config key: " + key);
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->clear();
    opt->add_result(text);
    opt->run_callback();
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Robust scatter estimation under sparsity constraints"};
  app.require_subcommand(1);

  std::string config_path;

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "draw MGGD samples, write CSV");
  int s_n = 100, s_p = 5;
  double s_beta = 1.0;
  unsigned long long s_seed = 1;
  std::string s_out = "-";
  std::string s_scatter;
  sample->add_option("--n", s_n, "number of draws");
  sample->add_option("--p", s_p, "dimension");
  sample->add_option("--beta", s_beta, "shape parameter");
  sample->add_option("--seed", s_seed, "RNG seed");
  sample->add_option("--scatter", s_scatter,
                     "CSV file with the p-by-p scatter matrix (default: identity)");
  sample->add_option("--out", s_out, "output CSV path ('-' for stdout)");
  sample->add_option("--config", config_path, "JSON config file mirroring the flags");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "fit one estimator, write a JSON report");
  std::string f_data, f_rho = "mggd", f_pattern = "full", f_init = "identity", f_out = "-";
  double f_beta = 1.0, f_huber = 1.0, f_lambda = -1.0;
  int f_max_iter = 30;
  double f_rel_tol = 1e-8;
  fit->add_option("--data", f_data, "input CSV sample (rows = observations)")->required();
  fit->add_option("--rho", f_rho, "mggd | tyler | huber");
  fit->add_option("--beta", f_beta, "MGGD shape parameter");
  fit->add_option("--huber-threshold", f_huber, "Huber threshold");
  fit->add_option("--pattern", f_pattern, "full | banded:d | grid:r,c | edges JSON file");
  fit->add_option("--lambda", f_lambda, "if >= 0, L1-penalized Cholesky fit instead");
  fit->add_option("--init", f_init, "identity | sample-covariance");
  fit->add_option("--max-iter", f_max_iter, "outer iteration budget");
  fit->add_option("--rel-tol", f_rel_tol, "relative convergence tolerance");
  fit->add_option("--out", f_out, "output JSON path ('-' for stdout)");
  fit->add_option("--config", config_path, "JSON config file mirroring the flags");

  // ---- experiments ----
  auto* exp1 = app.add_subcommand("exp1", "synthetic sweep, banded truth, beta = 0.5");
  auto* exp2 = app.add_subcommand("exp2", "synthetic sweep, banded truth, beta = 0.2");
  auto* exp3 = app.add_subcommand("exp3", "synthetic sweep, 3x3 grid truth, beta = 0.5");
  int e_trials = 500;
  unsigned long long e_seed = 1;
  std::string e_out = "-";
  for (auto* e : {exp1, exp2, exp3}) {
    e->add_option("--trials", e_trials, "Monte Carlo trials");
    e->add_option("--seed", e_seed, "master seed (trial seed = master + trial index)");
    e->add_option("--out", e_out, "output CSV path ('-' for stdout)");
    e->add_option("--config", config_path, "JSON config file mirroring the flags");
  }

  // ---- sonar ----
  auto* sonar = app.add_subcommand("sonar", "SONAR leave-one-out error table");
  std::string so_data = "data/sonar.all-data", so_out = "-";
  unsigned long long so_seed = 1;
  sonar->add_option("--data", so_data, "path to sonar.all-data");
  sonar->add_option("--seed", so_seed, "seed for the hyperparameter selection splits");
  sonar->add_option("--out", so_out, "output CSV path ('-' for stdout)");
  sonar->add_option("--config", config_path, "JSON config file mirroring the flags");

  // ---- selftest ----
  auto* selftest = app.add_subcommand("selftest", "compact invariant check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  CLI::App* cmd = app.get_subcommands().front();
  if (!config_path.empty()) apply_config(cmd, config_path);

  if (cmd == sample) {
    Matrix scatter = Matrix::Identity(s_p, s_p);
    if (!s_scatter.empty()) {
      SampleSet m = read_sampleset(s_scatter);
      if (m.n() != s_p || m.p() != s_p) throw WrongShape("scatter file is not p-by-p");
      scatter = m.rows;
    }
    SampleSet draws = mggd_sample(s_n, Vector::Zero(s_p), scatter, s_beta, s_seed);
    write_output(s_out, sampleset_to_csv(draws));
    return 0;
  }

  if (cmd == fit) {
    SampleSet data = read_sampleset(f_data);
    RhoFamily f = parse_rho(f_rho, f_beta, f_huber, data.p());
    FitConfig cfg;
    cfg.max_iter = f_max_iter;
    cfg.rel_tol = f_rel_tol;
    if (f_init == "sample-covariance")
      cfg.init = FitConfig::Init::SampleCovariance;
    else if (f_init != "identity")
      throw UsageError("unknown init: " + f_init);

    FitReport report;
    if (f_lambda >= 0.0) {
      report = fit_l1_cholesky(data, f, f_lambda, cfg);
    } else {
      SparsityPattern g = parse_pattern(f_pattern, data.p());
      if (g == SparsityPattern::complete(data.p()))
        report = fit_fixed_point(data, f, cfg);
      else if (find_perfect_elimination_order(g))
        report = fit_chordal_mm(data, f, g, cfg);
      else
        report = fit_general_mm(data, f, g, cfg);
    }
    write_output(f_out, report.to_json() + "\n");
    return 0;
  }

  if (cmd == exp1 || cmd == exp2 || cmd == exp3) {
    SyntheticSpec spec;
    if (cmd == exp3) {
      spec.p = 9;
      spec.beta = 0.5;
      spec.pattern = grid_pattern(3, 3);
      spec.truth = grid_precision(3, 3, 0.2).scatter;
    } else {
      spec.p = 10;
      spec.beta = (cmd == exp1) ? 0.5 : 0.2;
      spec.pattern = banded_pattern(10, 4);
      spec.truth = toeplitz_banded_precision(10, 4, 1.0, 0.4).scatter;
    }
    spec.n_grid = {20, 40, 60, 80, 100};
    spec.trials = e_trials;
    spec.estimators = {EstimatorKind::SampleCovariance, EstimatorKind::BandedGaussian,
                       EstimatorKind::Mggd, EstimatorKind::BMggdIdentityInit,
                       EstimatorKind::BMggdTruthInit};
    spec.seed = e_seed;
    write_output(e_out, run_synthetic(spec).to_csv());
    return 0;
  }

  if (cmd == sonar) {
    LabeledDataset data = load_sonar(so_data);
    SonarConfig cfg;
    cfg.seed = so_seed;
    write_output(so_out, sonar_experiment(data, cfg).to_csv());
    return 0;
  }

  if (cmd == selftest) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
      std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
      if (!ok) ++failures;
    };

    // Gaussian fit recovers the sample second moment.
    SampleSet data;
    data.rows.resize(200, 6);
    for (int i = 0; i < 200; ++i)
      for (int j = 0; j < 6; ++j) data.rows(i, j) = normal(rng);
    Matrix moment = (data.rows.transpose() * data.rows) / 200.0;
    FitReport g = fit_fixed_point(data, RhoFamily::mggd(1.0), {});
    check((g.scatter - moment).norm() < 1e-10 * moment.norm(),
          "beta=1 fixed point equals sample second moment");

    // Chordal MM keeps the requested zero pattern and descends.
    SparsityPattern band = banded_pattern(6, 2);
    FitReport b = fit_chordal_mm(data, RhoFamily::mggd(0.5), band, {});
    check(is_g_sparse(spd_inverse(b.scatter), band, 1e-8 * b.scatter.norm()),
          "banded fit has banded inverse");
    bool monotone = true;
    for (size_t i = 1; i < b.objective_trace.size(); ++i)
      monotone = monotone && b.objective_trace[i] <= b.objective_trace[i - 1] + 1e-10;
    check(monotone, "objective trace is non-increasing");

    // Sampler second moment matches the scale identity.
    SampleSet draws = mggd_sample(20000, Vector::Zero(4), Matrix::Identity(4, 4), 0.5, 11);
    Matrix emp = (draws.rows.transpose() * draws.rows) / draws.n();
    check((emp - covariance_scale(0.5, 4) * Matrix::Identity(4, 4)).norm() <
              0.1 * covariance_scale(0.5, 4) * 2.0,
          "sampler covariance scale");

    // Chordality detection.
    check(!find_perfect_elimination_order(grid_pattern(3, 3)).has_value(),
          "3x3 grid is not chordal");
    check(find_perfect_elimination_order(banded_pattern(8, 3)).has_value(),
          "band is chordal");

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 5;
  }

  throw UsageError("no subcommand selected");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const WrongShape& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DataShapeMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NonChordalPattern& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  } catch (const NotPerfectOrder& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
