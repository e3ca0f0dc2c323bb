// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regopt/bench.hpp"

using namespace regopt;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    out.passed = false;
    out.detail += "; runtime budget " + std::to_string(budget_s) + " s exceeded";
  }
  if (!out.passed) ++failures;
  std::printf("[%s] %d %s (%.2f s): %s\n", out.passed ? "PASS" : "FAIL", id, name.c_str(), secs,
              out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

constexpr std::uint64_t kSeed = 0;

Outcome rms_exactness() {
  const std::vector<std::pair<std::size_t, std::size_t>> shapes = {
      {1, 1}, {1, 16}, {16, 1}, {2, 4}, {8, 8}, {8, 16}, {16, 8}, {3, 100}, {100, 3}, {128, 256}};
  const auto r = check_rms_theorem(shapes, 10000, kSeed);
  return {r.passed && r.observed < 1e-12, "max |rms - sqrt(1/max(m,n))| = " + fmt(r.observed)};
}

Outcome descent_regime(double budget_per_p) {
  const Problem q = random_quadratic(4, 16, kSeed);
  bool ok = true;
  std::string detail;
  for (NormOrder p : {NormOrder::One, NormOrder::Two, NormOrder::Inf}) {
    DescentOptions o;
    o.p = p;
    o.seed = kSeed;
    o.max_iterations = 100000;
    o.grad_tol = 1e-6;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = check_descent_mu0(q, o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool this_ok = r.passed && !r.skipped && secs < budget_per_p;
    ok = ok && this_ok;
    detail += "p=" + to_string(p) + (this_ok ? " ok" : " violated") + " [" + r.detail + "]; ";
  }
  return {ok, detail};
}

Outcome finite_n_inequality() {
  std::size_t runs = 0, violations = 0;
  double worst_ratio = 0.0;
  std::string first;
  for (std::size_t m : {2, 4, 8}) {
    const Problem q = random_quadratic(m, 2 * m, kSeed + m);
    for (double mu : {0.5, 0.9, 0.99}) {
      for (double alpha : {1e-3, 1e-2}) {
        MomentumBoundOptions o;
        o.mu = mu;
        o.alpha = alpha;
        o.iterations = 10000;
        o.tol = 1e-9;
        o.seed = kSeed;
        ++runs;
        const auto reports = check_finite_n_bound(q, o);
        for (const auto& r : reports) {
          if (r.check == "lyapunov_step") continue;
          if (r.check == "finite_n_bound") worst_ratio = std::max(worst_ratio, r.observed / r.bound);
          if (!r.passed) {
            ++violations;
            if (first.empty()) first = r.check + " m=" + std::to_string(m) + " mu=" + fmt(mu) + ": " + r.detail;
          }
        }
      }
    }
  }
  std::string detail = std::to_string(runs) + " runs, " + std::to_string(violations) +
                       " violations, max min_g/bound = " + fmt(worst_ratio);
  if (!first.empty()) detail += "; first: " + first;
  return {violations == 0, detail};
}

Outcome gamma_bounds() {
  const std::size_t m = 4, n = 16;
  const Problem q = random_quadratic(m, n, kSeed);
  bool ok = true;
  std::string detail;
  for (NormOrder p : {NormOrder::Two, NormOrder::One, NormOrder::Inf}) {
    const auto eq = norm_equivalence(p, n);
    const double alpha = 1.0 / (*q.lipschitz * eq.gamma * eq.gamma);
    const auto r = check_gamma_bounds_run(q, p, alpha, 1000, kSeed);
    bool this_ok = r.report.passed;
    if (p == NormOrder::Two) {
      for (double w : r.weighted) this_ok = this_ok && std::abs(w - 1.0) <= 1e-12;
    }
    ok = ok && this_ok;
    detail += "p=" + to_string(p) + ": " + r.report.detail + "; ";
  }
  return {ok, detail};
}

Outcome minimality() {
  MinimalityOptions o;
  o.matrices = 100;
  o.max_dim = 16;
  o.scalings = 1000;
  o.seed = kSeed;
  const auto r = check_equilibration_minimality(TheoremId::T1a, o);
  return {r.passed, r.detail + "; max(kappa_eq - kappa_sampled) = " + fmt(r.observed)};
}

Outcome gradient_audits() {
  std::vector<Problem> problems;
  problems.push_back(random_quadratic(4, 6, kSeed));
  problems.push_back(quadratic_problem(Matrix::identity(3), Matrix::identity(5), Matrix(3, 5)));
  problems.push_back(build_problem({{"name", "logistic"}, {"classes", 1}}, kSeed));
  problems.back().name = "logistic_binary";
  problems.push_back(build_problem({{"name", "logistic"}, {"classes", 4}}, kSeed));
  problems.push_back(build_problem({{"name", "mlp"}}, kSeed));
  problems.push_back(build_problem({{"name", "mlp"}, {"loss", "mse"}}, kSeed));
  problems.back().name = "mlp_mse";
  problems.push_back(rosenbrock_matrix(2, 3));
  bool ok = true;
  std::string detail;
  for (const auto& p : problems) {
    const auto a = finite_diff_gradient_audit(p, 10, 1e-5, kSeed, 1e-5);
    ok = ok && a.passed && a.max_rel_error < 1e-5;
    detail += p.name + "=" + fmt(a.max_rel_error) + " ";
  }
  return {ok, "max relative error per problem: " + detail};
}

// Runs every alpha in the grid and returns the best final loss and its alpha.
std::pair<double, double> tuned(json cfg, const std::vector<double>& grid) {
  double best = std::numeric_limits<double>::infinity(), best_alpha = 0.0;
  for (double a : grid) {
    cfg["optimizer"]["alpha"] = a;
    const auto r = run_experiment(ExperimentConfig::from_json(cfg));
    const double f = r.status == "ok" ? r.record.f.back() : std::numeric_limits<double>::infinity();
    if (f < best) best = f, best_alpha = a;
  }
  return {best, best_alpha};
}

Outcome optimizer_comparison() {
  const std::vector<std::pair<std::string, json>> problems = {
      {"logistic", {{"name", "logistic"}, {"samples", 1024}, {"features", 8}, {"classes", 4}, {"separation", 0.5}}},
      {"mlp", {{"name", "mlp"}, {"inputs", 4}, {"hidden", 16}, {"outputs", 3}, {"samples", 1024}, {"separation", 0.7}}}};
  const std::vector<double> adam_grid{1e-1, 3e-2, 1e-2, 3e-3};
  const std::vector<double> reg_grid{1.0, 3e-1, 1e-1, 3e-2};
  const std::vector<double> ngd_grid{3e-2, 3e-3, 3e-4, 3e-5};
  // Equal losses at a shared optimum count as "NGD not below REG".
  constexpr double kTieTol = 1e-9;

  bool ok = true;
  std::string detail;
  for (const auto& [label, problem] : problems) {
    json base = {{"problem", problem},
                 {"schedule", {{"kind", "cosine"}, {"warmup_fraction", 0.05}}},
                 {"iterations", 5000},
                 {"seed", kSeed}};
    base["optimizer"] = {{"name", "adam"}};
    const auto [adam, adam_a] = tuned(base, adam_grid);
    base["optimizer"] = {{"name", "reg"}, {"p", 2}, {"rho_target", 0.2}};
    const auto [reg, reg_a] = tuned(base, reg_grid);
    base["optimizer"] = {{"name", "reg"}, {"p", 2}, {"rho_target", 0.2}, {"momentum_chain", "raw"}};
    const auto [reg_raw, reg_raw_a] = tuned(base, reg_grid);
    base["optimizer"] = {{"name", "ngd"}};
    const auto [ngd, ngd_a] = tuned(base, ngd_grid);

    const bool within = reg <= 1.1 * adam;
    const bool ordered = ngd >= reg * (1.0 - kTieTol);
    ok = ok && within && ordered;
    detail += label + ": adam " + fmt(adam) + " (lr " + fmt(adam_a) + "), reg " + fmt(reg) + " (lr " +
              fmt(reg_a) + ", ratio " + fmt(reg / adam) + (within ? " ok" : " > 1.1") + "), ngd " +
              fmt(ngd) + " (lr " + fmt(ngd_a) + (ordered ? ", >= reg" : ", below reg") +
              "); info: reg with raw momentum chain " + fmt(reg_raw) + " (lr " + fmt(reg_raw_a) +
              ", ratio " + fmt(reg_raw / adam) + "). ";
  }
  return {ok, detail};
}

Outcome ngd_rms() {
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<std::size_t> dim(1, 64);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t m = dim(rng), n = dim(rng);
    const Matrix w(m, n);
    const Matrix g = random_normal(m, n, rng);
    OptState s = OptState::zeros_like(w);
    const Matrix update = w - ngd_step(w, g, s, 1.0, 0.0);
    worst = std::max(worst, std::abs(rms(update) - 1.0 / std::sqrt(static_cast<double>(m * n))));
  }
  return {worst < 1e-12, "max |rms - 1/sqrt(mn)| over 1000 matrices = " + fmt(worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "regopt_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<json> configs = {
      json::parse(R"({"problem": {"name": "quadratic", "m": 4, "n": 8},
                      "optimizer": {"name": "reg", "alpha": 0.05},
                      "schedule": {"kind": "cosine"}, "iterations": 500, "seed": 3})"),
      json::parse(R"({"problem": {"name": "mlp"}, "optimizer": {"name": "adamw", "alpha": 0.01,
                      "weight_decay": 0.01}, "iterations": 300, "seed": 5})"),
      json::parse(R"({"problem": {"name": "mlp"}, "optimizer": {"name": "reg", "alpha": 0.1,
                      "hybrid": {"adamw_groups": ["layer1"]}}, "iterations": 300, "seed": 7})")};
  bool ok = true;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string csv[2];
    for (int rep = 0; rep < 2; ++rep) {
      json cfg = configs[i];
      cfg["output_dir"] = (root / (std::to_string(i) + "_" + std::to_string(rep))).string();
      csv[rep] = slurp(run_to_disk(ExperimentConfig::from_json(cfg)));
    }
    ok = ok && !csv[0].empty() && csv[0] == csv[1];
  }
  fs::remove_all(root);
  return {ok, std::to_string(configs.size()) + " configs run twice, CSVs " +
                  (ok ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  criterion(1, "rms of l2-normalized matrices is sqrt(1/max(m,n))", 10, rms_exactness);
  criterion(2, "fixed-step naive reg (mu=0) descends monotonically to a stationary point", 90,
            [] { return descent_regime(30); });
  criterion(3, "finite-N momentum bound and per-step h_k lower bound", 120, finite_n_inequality);
  criterion(4, "gamma_k stays within the norm-equivalence constants", 60, gamma_bounds);
  criterion(5, "row-1-norm equilibration minimizes kappa over row scalings", 60, minimality);
  criterion(6, "analytic gradients match central differences", 60, gradient_audits);
  criterion(7, "reg within 1.1x of tuned adam and ngd not below reg", 300, optimizer_comparison);
  criterion(8, "ngd update rms is 1/sqrt(mn)", 10, ngd_rms);
  criterion(9, "repeated runs write byte-identical csv", 60, determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
