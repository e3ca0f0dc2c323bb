#include "regopt/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace regopt {

using nlohmann::json;

double row_norm_sum(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += row_norm(m, i, NormOrder::Two);
  return s;
}

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1a:
      return "T1a";
    case TheoremId::T1b:
      return "T1b";
    case TheoremId::T2:
      return "T2";
    case TheoremId::T3:
      return "T3";
    case TheoremId::T4:
      return "T4";
  }
  return "?";
}

TheoremId parse_theorem_id(const std::string& text) {
  for (TheoremId id : {TheoremId::T1a, TheoremId::T1b, TheoremId::T2, TheoremId::T3, TheoremId::T4}) {
    if (text == to_string(id)) return id;
  }
  throw ConfigInvalid("unknown theorem id '" + text + "' (expected T1a, T1b, T2, T3 or T4)");
}

TheoremReport TheoremReport::evaluate(TheoremId id, std::string check, double observed,
                                      double bound, double tol) {
  TheoremReport r;
  r.theorem_id = id;
  r.check = std::move(check);
  r.observed = observed;
  r.bound = bound;
  r.tol = tol;
  r.margin = bound - observed;
  r.passed = std::isfinite(observed) && observed <= bound * (1.0 + tol);
  return r;
}

namespace {

// JSON has no NaN/Inf; encode them as strings so reports stay parseable.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

json TheoremReport::to_json() const {
  return json{{"theorem_id", to_string(theorem_id)},
              {"check", check},
              {"passed", passed},
              {"skipped", skipped},
              {"observed", number(observed)},
              {"bound", number(bound)},
              {"margin", number(margin)},
              {"tol", tol},
              {"detail", detail},
              {"seed", seed},
              {"config", config}};
}

NormEquivalence norm_equivalence(NormOrder p, std::size_t length) {
  const double root = std::sqrt(static_cast<double>(length));
  switch (p) {
    case NormOrder::One:
      return {1.0 / root, 1.0};
    case NormOrder::Two:
      return {1.0, 1.0};
    case NormOrder::Inf:
      return {1.0, root};
  }
  return {1.0, 1.0};
}

std::size_t normalized_line_length(std::size_t rows, std::size_t cols) {
  return resolve_axis(rows, cols, AxisPolicy::ShapeDriven) == Axis::Rows ? cols : rows;
}

namespace {

void require_single_block(const Problem& problem, const char* who) {
  if (problem.blocks.size() != 1) {
    throw ConfigInvalid(std::string(who) + ": problem '" + problem.name +
                        "' must have a single parameter block");
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt_exact(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

TheoremReport check_descent_mu0(const Problem& problem, const DescentOptions& opts,
                                RunRecord* record) {
  require_single_block(problem, "check_descent_mu0");
  const auto& blk = problem.blocks.front();
  const auto eq = norm_equivalence(opts.p, normalized_line_length(blk.rows, blk.cols));

  json cfg = {{"problem", problem.name}, {"p", to_string(opts.p)},
              {"max_iterations", opts.max_iterations}, {"grad_tol", opts.grad_tol}};

  if (!problem.lipschitz) {
    TheoremReport r;
    r.theorem_id = TheoremId::T3;
    r.check = "descent_mu0";
    r.skipped = true;
    r.detail = "problem has no recorded Lipschitz constant";
    r.config = cfg;
    r.seed = opts.seed;
    return r;
  }
  const double threshold = 2.0 / (*problem.lipschitz * eq.gamma * eq.gamma);
  const double alpha = opts.alpha > 0.0 ? opts.alpha : 0.5 * threshold;
  cfg["alpha"] = alpha;
  cfg["alpha_threshold"] = threshold;
  if (!(alpha < threshold)) {
    TheoremReport r;
    r.theorem_id = TheoremId::T3;
    r.check = "descent_mu0";
    r.skipped = true;
    r.bound = threshold;
    r.observed = alpha;
    r.detail = "precondition alpha < 2/(L Gamma^2) = " + fmt(threshold) + " does not hold";
    r.config = cfg;
    r.seed = opts.seed;
    return r;
  }

  Matrix w = problem.init(opts.seed).front();
  OptState state = OptState::zeros_like(w);
  double f = problem.value_of(w);
  double min_grad = std::numeric_limits<double>::infinity();
  std::size_t increases = 0;
  std::size_t first_increase = 0;
  double first_before = 0.0, first_after = 0.0;
  std::size_t reached_at = 0;
  bool reached = false;

  for (std::size_t k = 0; k < opts.max_iterations; ++k) {
    const Matrix g = problem.gradient_of(w);
    const double gf = frobenius_norm(g);
    min_grad = std::min(min_grad, gf);
    if (record) {
      record->f.push_back(f);
      record->grad_fro.push_back(gf);
      record->g.push_back(row_norm_sum(g));
      record->h.push_back(row_norm_sum(g));
      record->lyapunov.push_back(f);
      record->lr.push_back(alpha);
    }
    if (gf < opts.grad_tol) {
      reached = true;
      reached_at = k;
      if (record) record->update_rms.push_back(0.0);
      break;
    }
    const Matrix next = naive_reg_step(w, g, state, alpha, 0.0, opts.p);
    if (record) record->update_rms.push_back(rms(w - next));
    w = next;
    const double f_next = problem.value_of(w);
    if (f_next > f + 1e-12 * std::abs(f)) {
      if (increases == 0) {
        first_increase = k;
        first_before = f;
        first_after = f_next;
      }
      ++increases;
    }
    f = f_next;
  }

  TheoremReport r = TheoremReport::evaluate(TheoremId::T3, "descent_mu0", min_grad, opts.grad_tol, 0.0);
  r.passed = r.passed && reached && increases == 0;
  std::ostringstream detail;
  detail << "min ||grad||_F = " << fmt(min_grad);
  if (reached) detail << " (below tolerance at iteration " << reached_at << ")";
  detail << "; f increased on " << increases << " steps";
  if (increases > 0) {
    detail << ", first at iteration " << first_increase << " (" << fmt_exact(first_before) << " -> "
           << fmt_exact(first_after) << ")";
  }
  r.detail = detail.str();
  r.config = cfg;
  r.seed = opts.seed;
  if (record) {
    record->config = cfg;
    record->seed = opts.seed;
  }
  return r;
}

GammaStats gamma_stats(const Matrix& grad, NormOrder p) {
  const bool rows = resolve_axis(grad.rows(), grad.cols(), AxisPolicy::ShapeDriven) == Axis::Rows;
  const std::size_t lines = rows ? grad.rows() : grad.cols();
  double sq_norm_tilde = 0.0;  // ‖G̃‖_F²
  double inner = 0.0;          // ⟨G, G̃⟩_F = Σ w_i
  double weighted_sum = 0.0;   // Σ w_i z_i
  for (std::size_t i = 0; i < lines; ++i) {
    const std::vector<double> v = rows ? std::vector<double>(grad.row(i).begin(), grad.row(i).end())
                                       : grad.col(i);
    const double n2 = vector_norm(v, NormOrder::Two);
    const double np = vector_norm(v, p);
    if (np == 0.0) continue;
    const double z = n2 / np;
    const double w = n2 * n2 / np;
    sq_norm_tilde += z * z;
    inner += w;
    weighted_sum += w * z;
  }
  if (inner == 0.0) throw ZeroGradient("gamma_stats: gradient is zero");
  return {sq_norm_tilde / inner, weighted_sum / inner};
}

GammaReport check_gamma_bounds(const std::vector<Matrix>& grads, NormOrder p) {
  if (grads.empty()) throw ConfigInvalid("check_gamma_bounds: empty trajectory");
  const auto& g0 = grads.front();
  const auto eq = norm_equivalence(p, normalized_line_length(g0.rows(), g0.cols()));

  GammaReport out;
  double worst = 0.0;
  double ratio_lo = std::numeric_limits<double>::infinity();
  double ratio_hi = 0.0;
  std::size_t ratio_outside = 0;
  for (const auto& g : grads) {
    const auto s = gamma_stats(g, p);
    out.weighted.push_back(s.weighted);
    out.ratio.push_back(s.ratio);
    worst = std::max({worst, s.weighted / eq.gamma, eq.delta / s.weighted});
    ratio_lo = std::min(ratio_lo, s.ratio);
    ratio_hi = std::max(ratio_hi, s.ratio);
    if (s.ratio < eq.delta * (1 - 1e-12) || s.ratio > eq.gamma * (1 + 1e-12)) ++ratio_outside;
  }
  out.report = TheoremReport::evaluate(TheoremId::T3, "gamma_bounds", worst, 1.0, 1e-12);
  std::ostringstream detail;
  detail << "weighted gamma in [" << fmt(*std::min_element(out.weighted.begin(), out.weighted.end()))
         << ", " << fmt(*std::max_element(out.weighted.begin(), out.weighted.end()))
         << "] vs [delta, Gamma] = [" << fmt(eq.delta) << ", " << fmt(eq.gamma)
         << "]; ratio ||G~||^2/<G,G~> in [" << fmt(ratio_lo) << ", " << fmt(ratio_hi) << "], outside on "
         << ratio_outside << "/" << grads.size() << " steps";
  out.report.detail = detail.str();
  out.report.config = {{"p", to_string(p)}, {"steps", grads.size()}, {"delta", eq.delta},
                       {"Gamma", eq.gamma}};
  return out;
}

GammaReport check_gamma_bounds_run(const Problem& problem, NormOrder p, double alpha,
                                   std::size_t iterations, std::uint64_t seed) {
  require_single_block(problem, "check_gamma_bounds_run");
  Matrix w = problem.init(seed).front();
  OptState state = OptState::zeros_like(w);
  std::vector<Matrix> grads;
  grads.reserve(iterations);
  for (std::size_t k = 0; k < iterations; ++k) {
    Matrix g = problem.gradient_of(w);
    if (max_abs(g) == 0.0) break;
    w = naive_reg_step(w, g, state, alpha, 0.0, p);
    grads.push_back(std::move(g));
  }
  GammaReport r = check_gamma_bounds(grads, p);
  r.report.seed = seed;
  r.report.config["problem"] = problem.name;
  r.report.config["alpha"] = alpha;
  return r;
}

std::vector<TheoremReport> check_finite_n_bound(const Problem& problem,
                                                const MomentumBoundOptions& opts,
                                                RunRecord* record) {
  require_single_block(problem, "check_finite_n_bound");
  if (!problem.lipschitz || !problem.f_star) {
    throw ConfigInvalid("check_finite_n_bound: problem '" + problem.name +
                        "' needs a Lipschitz constant and f*");
  }
  const auto& blk = problem.blocks.front();
  if (blk.rows > blk.cols) throw ConfigInvalid("check_finite_n_bound: requires rows <= cols");
  if (!(opts.mu >= 0.0 && opts.mu < 1.0)) throw ConfigInvalid("mu must lie in [0, 1)");
  if (!(opts.alpha > 0.0) || opts.iterations == 0) {
    throw ConfigInvalid("check_finite_n_bound: alpha and iterations must be positive");
  }

  const double mu = opts.mu;
  const double alpha = opts.alpha;
  const double lip = *problem.lipschitz;
  const double m = static_cast<double>(blk.rows);
  const double c = alpha * mu / (2.0 * (1.0 - mu));
  const std::size_t n_iter = opts.iterations;

  Matrix w = problem.init(opts.seed).front();
  OptState state = OptState::zeros_like(w);
  const double f0 = problem.value_of(w);
  double f = f0;
  double min_g = std::numeric_limits<double>::infinity();
  double worst_h = -std::numeric_limits<double>::infinity();
  double worst_lyap = -std::numeric_limits<double>::infinity();
  std::size_t worst_h_at = 0, worst_lyap_at = 0;

  for (std::size_t k = 0; k < n_iter; ++k) {
    const Matrix grad = problem.gradient_of(w);
    const double g = row_norm_sum(grad);
    min_g = std::min(min_g, g);

    const double mk_sq = std::pow(frobenius_norm(state.momentum), 2);
    const double lyap_k = f + c * mk_sq;

    StepTrace trace;
    const Matrix next = naive_reg_step(w, grad, state, alpha, mu, NormOrder::Two,
                                       AxisPolicy::ForceRows, &trace);
    const Matrix& raw = *trace.raw_momentum;
    for (std::size_t i = 0; i < raw.rows(); ++i) {
      if (row_norm(raw, i, NormOrder::Two) == 0.0) throw ZeroRowAbort(k, i);
    }
    const double h = row_norm_sum(raw);

    const double f_next = problem.value_of(next);
    const double lyap_next = f_next + c * std::pow(frobenius_norm(state.momentum), 2);

    // h_k ≥ (1−μ)g_k − μm
    const double h_floor = (1.0 - mu) * g - mu * m;
    const double h_excess = (h_floor - h) / std::max({std::abs(h), std::abs(h_floor), 1.0});
    if (h_excess > worst_h) {
      worst_h = h_excess;
      worst_h_at = k;
    }

    // L_{k+1} − L_k ≤ −αh_k/(1−μ) + αμm/(1−μ) + Lα²m/2
    const double rhs = -alpha * h / (1.0 - mu) + alpha * mu * m / (1.0 - mu) + lip * alpha * alpha * m / 2.0;
    const double scale = std::max({std::abs(lyap_k), std::abs(lyap_next), std::abs(rhs), 1e-300});
    const double lyap_excess = ((lyap_next - lyap_k) - rhs) / scale;
    if (lyap_excess > worst_lyap) {
      worst_lyap = lyap_excess;
      worst_lyap_at = k;
    }

    if (record) {
      record->f.push_back(f);
      record->grad_fro.push_back(frobenius_norm(grad));
      record->g.push_back(g);
      record->h.push_back(h);
      record->lyapunov.push_back(lyap_k);
      record->update_rms.push_back(rms(w - next));
      record->lr.push_back(alpha);
    }
    w = next;
    f = f_next;
  }

  const double f_star = *problem.f_star;
  const double bound = (f0 - f_star) / (static_cast<double>(n_iter) * alpha) +
                       2.0 * mu * m / (1.0 - mu) + lip * alpha * m / 2.0;

  json cfg = {{"problem", problem.name}, {"mu", mu}, {"alpha", alpha}, {"N", n_iter},
              {"L", lip}, {"f_star", f_star}, {"f0", f0}, {"m", blk.rows}, {"n", blk.cols},
              {"c", c}};

  std::vector<TheoremReport> out;
  out.push_back(TheoremReport::evaluate(TheoremId::T4, "finite_n_bound", min_g, bound, opts.tol));
  out.back().detail = "min_k g_k = " + fmt(min_g) + " vs bound " + fmt(bound) +
                      " (asymptotic part " + fmt(2.0 * mu * m / (1.0 - mu) + lip * alpha * m / 2.0) + ")";
  out.push_back(TheoremReport::evaluate(TheoremId::T4, "h_lower_bound", worst_h, opts.tol, 0.0));
  out.back().detail = "worst normalized excess of (1-mu)g_k - mu m over h_k at iteration " +
                      std::to_string(worst_h_at);
  out.push_back(TheoremReport::evaluate(TheoremId::T4, "lyapunov_step", worst_lyap, opts.tol, 0.0));
  out.back().detail = "worst normalized excess of L_{k+1}-L_k over its bound at iteration " +
                      std::to_string(worst_lyap_at);
  for (auto& r : out) {
    r.config = cfg;
    r.seed = opts.seed;
  }
  if (record) {
    record->config = cfg;
    record->seed = opts.seed;
  }
  return out;
}

TheoremReport check_rms_theorem(const std::vector<std::pair<std::size_t, std::size_t>>& shapes,
                                std::size_t trials, std::uint64_t seed) {
  if (shapes.empty() || trials == 0) throw ConfigInvalid("check_rms_theorem: nothing to check");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::pair<std::size_t, std::size_t> worst_shape = shapes.front();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto [m, n] = shapes[t % shapes.size()];
    const Matrix a = random_normal(m, n, rng);
    const double dev = std::abs(rms(normal(a, NormOrder::Two)) - rms_closed_form(m, n));
    if (dev > worst) {
      worst = dev;
      worst_shape = {m, n};
    }
  }
  TheoremReport r = TheoremReport::evaluate(TheoremId::T2, "rms_closed_form", worst, 1e-12, 0.0);
  r.detail = "max |rms(normal(M;2)) - sqrt(1/max(m,n))| = " + fmt(worst) + " at shape " +
             std::to_string(worst_shape.first) + "x" + std::to_string(worst_shape.second);
  r.seed = seed;
  r.config = {{"trials", trials}, {"shapes", shapes.size()}};
  return r;
}

TheoremReport check_equilibration_minimality(TheoremId which, const MinimalityOptions& opts) {
  if (which != TheoremId::T1a && which != TheoremId::T1b) {
    throw ConfigInvalid("check_equilibration_minimality: expects T1a or T1b");
  }
  const bool rows = which == TheoremId::T1a;
  const KappaKind kind{rows ? KappaVariant::InfOverStar : KappaVariant::OneOverStar, opts.star};
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> dim(1, opts.max_dim);
  std::normal_distribution<double> log_scale(0.0, 2.0);

  double worst = -std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t t = 0; t < opts.matrices; ++t) {
    const std::size_t m = dim(rng);
    const std::size_t n = dim(rng);
    const Matrix a = random_normal(m, n, rng);
    const Matrix eq = rows ? equilibrate_rows_1norm(a).scaled : equilibrate_cols_1norm(a).scaled;
    const double k_eq = kappa(eq, kind);
    std::vector<double> d(rows ? m : n);
    for (std::size_t s = 0; s < opts.scalings; ++s) {
      for (double& x : d) x = std::exp(log_scale(rng));
      const double k_d = kappa(rows ? scale_rows(a, d) : scale_cols(a, d), kind);
      const double excess = k_eq - k_d;
      worst = std::max(worst, excess);
      if (excess > 1e-12) ++violations;
    }
  }
  TheoremReport r = TheoremReport::evaluate(which, rows ? "row_equilibration_minimal"
                                                        : "col_equilibration_minimal",
                                            worst, 1e-12, 0.0);
  r.detail = std::to_string(violations) + " violations over " +
             std::to_string(opts.matrices * opts.scalings) + " sampled scalings";
  r.seed = opts.seed;
  r.config = {{"matrices", opts.matrices}, {"max_dim", opts.max_dim}, {"scalings", opts.scalings},
              {"star", opts.star.kind == StarNorm::Kind::Frobenius ? "frobenius"
                                                                     : "holder_" + to_string(opts.star.q)}};
  return r;
}

json AuditReport::to_json() const {
  return json{{"problem", problem},
              {"points", points},
              {"max_rel_error", number(max_rel_error)},
              {"tol", tol},
              {"passed", passed}};
}

AuditReport finite_diff_gradient_audit(const Problem& problem, std::size_t points, double step,
                                       std::uint64_t seed, double tol) {
  if (points == 0 || !(step > 0.0)) throw ConfigInvalid("audit: points and step must be positive");
  AuditReport report;
  report.problem = problem.name;
  report.points = points;
  report.tol = tol;
  for (std::size_t k = 0; k < points; ++k) {
    Params w = problem.init(seed + k);
    problem.check_params(w);
    const Params analytic = problem.gradient(w);
    double diff_sq = 0.0, ga_sq = 0.0, gn_sq = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) {
      auto data = w[b].data();
      const auto ga = analytic[b].data();
      for (std::size_t e = 0; e < data.size(); ++e) {
        const double saved = data[e];
        data[e] = saved + step;
        const double fp = problem.value(w);
        data[e] = saved - step;
        const double fm = problem.value(w);
        data[e] = saved;
        const double gn = (fp - fm) / (2.0 * step);
        diff_sq += (gn - ga[e]) * (gn - ga[e]);
        ga_sq += ga[e] * ga[e];
        gn_sq += gn * gn;
      }
    }
    const double rel = std::sqrt(diff_sq) / std::max({std::sqrt(ga_sq), std::sqrt(gn_sq), 1e-8});
    report.max_rel_error = std::max(report.max_rel_error, rel);
  }
  report.passed = report.max_rel_error < tol;
  return report;
}

}  // namespace regopt
