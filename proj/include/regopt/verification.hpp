#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regopt/matrix.hpp"
#include "regopt/optimizers.hpp"
#include "regopt/problems.hpp"
#include "regopt/racs.hpp"

#include <json.hpp>

namespace regopt {

/// Per-iteration trajectory of one optimizer run. Entry k describes W_k and
/// the step taken from it.
struct RunRecord {
  std::vector<double> f;           // f(W_k)
  std::vector<double> grad_fro;    // ‖∇f(W_k)‖_F
  std::vector<double> g;           // Σ_i ‖(∇f(W_k))_{i,:}‖_2
  std::vector<double> h;           // Σ_i ‖(M'_{k+1})_{i,:}‖_2
  std::vector<double> lyapunov;    // f(W_k) + c‖M_k‖_F²
  std::vector<double> update_rms;  // RMS(W_k − W_{k+1})
  std::vector<double> lr;          // learning rate used at step k
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return f.size(); }
};

/// Sum of row ℓ2 norms across all blocks.
double row_norm_sum(const Matrix& m);

enum class TheoremId { T1a, T1b, T2, T3, T4 };

std::string to_string(TheoremId id);
TheoremId parse_theorem_id(const std::string& text);

/// Outcome of one numerical check. `passed` ⇔ observed ≤ bound·(1+tol),
/// unless the check was skipped because its precondition does not hold.
struct TheoremReport {
  TheoremId theorem_id = TheoremId::T2;
  std::string check;
  bool passed = false;
  bool skipped = false;
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound − observed
  double tol = 0.0;
  std::string detail;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();

  static TheoremReport evaluate(TheoremId id, std::string check, double observed, double bound,
                                double tol);
  nlohmann::json to_json() const;
};

/// ‖v‖_2/‖v‖_p over nonzero v of the given length lies in [delta, gamma].
struct NormEquivalence {
  double delta;
  double gamma;
};
NormEquivalence norm_equivalence(NormOrder p, std::size_t length);

/// Length of the lines that `normal` rescales under the shape-driven policy.
std::size_t normalized_line_length(std::size_t rows, std::size_t cols);

struct DescentOptions {
  NormOrder p = NormOrder::Two;
  double alpha = 0.0;        // 0 → half the precondition threshold
  std::size_t max_iterations = 100000;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
};

/// Naive REG with μ = 0 from problem.init(seed). Requires a recorded L and
/// alpha < 2/(LΓ²); otherwise the report is marked skipped.
/// Passes iff f never increases and ‖∇f‖_F drops below grad_tol within budget.
TheoremReport check_descent_mu0(const Problem& problem, const DescentOptions& opts,
                                RunRecord* record = nullptr);

/// ‖G̃‖_F²/⟨G, G̃⟩_F (the ratio that enters the descent inequality) and the
/// weighted average Σ w_i z_i / Σ w_i with z_i = ‖v_i‖_2/‖v_i‖_p and
/// w_i = ‖v_i‖_2²/‖v_i‖_p over nonzero normalized lines v_i.
struct GammaStats {
  double ratio;
  double weighted;
};
GammaStats gamma_stats(const Matrix& grad, NormOrder p);

struct GammaReport {
  TheoremReport report;
  std::vector<double> weighted;  // per step, checked against [δ, Γ]
  std::vector<double> ratio;     // per step, recorded only
};

/// Checks δ ≤ weighted γ_k ≤ Γ (relative tol 1e-12) over a gradient trajectory.
GammaReport check_gamma_bounds(const std::vector<Matrix>& grads, NormOrder p);

/// Convenience: runs naive REG with μ = 0 for `iterations` steps on the problem
/// and checks the gradients it visits.
GammaReport check_gamma_bounds_run(const Problem& problem, NormOrder p, double alpha,
                                   std::size_t iterations, std::uint64_t seed);

struct MomentumBoundOptions {
  double mu = 0.9;
  double alpha = 1e-2;
  std::size_t iterations = 10000;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

/// Row-normalized GDM (p = 2, rows ≤ cols, M_0 = 0, normalized momentum chain).
/// Returns three reports:
///   "finite_n_bound"   min_k g_k ≤ (f(W_0)−f*)/(Nα) + 2μm/(1−μ) + Lαm/2
///   "h_lower_bound"    h_k ≥ (1−μ)g_k − μm at every step
///   "lyapunov_step"    L_{k+1} − L_k ≤ −αh_k/(1−μ) + αμm/(1−μ) + Lα²m/2 at every step
/// with c = αμ/(2(1−μ)). Throws ZeroRowAbort if a momentum row vanishes,
/// ConfigInvalid when the problem lacks L or f*, or rows > cols.
std::vector<TheoremReport> check_finite_n_bound(const Problem& problem,
                                                const MomentumBoundOptions& opts,
                                                RunRecord* record = nullptr);

/// Max |rms(normal(M;2)) − sqrt(1/max(m,n))| over `trials` random matrices
/// with shapes cycled from `shapes`.
TheoremReport check_rms_theorem(const std::vector<std::pair<std::size_t, std::size_t>>& shapes,
                                std::size_t trials, std::uint64_t seed);

struct MinimalityOptions {
  std::size_t matrices = 100;
  std::size_t max_dim = 16;
  std::size_t scalings = 1000;
  StarNorm star = StarNorm::frobenius();
  std::uint64_t seed = 0;
};

/// Sampling oracle: κ of the 1-norm-equilibrated matrix versus κ of random
/// positive diagonal scalings. T1a scales rows (κ = ‖·‖_∞/‖·‖*), T1b columns.
/// observed = max(κ_equilibrated − κ_sampled), bound = 1e-12.
TheoremReport check_equilibration_minimality(TheoremId which, const MinimalityOptions& opts);

struct AuditReport {
  std::string problem;
  std::size_t points = 0;
  double max_rel_error = 0.0;
  double tol = 1e-5;
  bool passed = false;

  nlohmann::json to_json() const;
};

/// Central differences on `points` random points near problem.init(seed + k).
/// Relative error per point is ‖g − g_fd‖_F / max(‖g‖_F, ‖g_fd‖_F, 1e-8).
AuditReport finite_diff_gradient_audit(const Problem& problem, std::size_t points, double step,
                                       std::uint64_t seed, double tol = 1e-5);

}  // namespace regopt
