#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regopt/matrix.hpp"
#include "regopt/racs.hpp"

namespace regopt {

/// How the RMS of the normalized momentum is obtained before rescaling.
/// ClosedForm uses sqrt(1/max(m,n)) and is only valid for single-pass,
/// shape-driven ℓ2 normalization.
enum class RmsMode { ClosedForm, Empirical };

/// What the next step's μ·M_k term sees: the normalized momentum (default,
/// matches the in-place overwrite of the naive update) or the raw average.
enum class MomentumChain { Normalized, Raw };

/// SinglePass applies `normal` once; Alternating runs `racs_iterations`
/// row-then-column rounds.
enum class NormalizationScheme { SinglePass, Alternating };

std::string to_string(RmsMode mode);
std::string to_string(MomentumChain chain);
std::string to_string(NormalizationScheme scheme);
RmsMode parse_rms_mode(const std::string& text);
MomentumChain parse_momentum_chain(const std::string& text);
NormalizationScheme parse_normalization_scheme(const std::string& text);

struct RegConfig {
  double alpha = 0.01;
  double mu = 0.9;
  NormOrder p = NormOrder::Two;
  double rho_target = 0.2;
  double weight_decay = 0.0;
  std::size_t racs_iterations = 1;
  AxisPolicy policy = AxisPolicy::ShapeDriven;
  NormalizationScheme scheme = NormalizationScheme::SinglePass;
  RmsMode rms_mode = RmsMode::Empirical;
  MomentumChain momentum_chain = MomentumChain::Normalized;

  /// Throws ConfigInvalid on out-of-range or inconsistent settings.
  void validate() const;
  /// Same checks minus the learning rate, which schedules may drive to zero.
  void validate_rule() const;
  /// Soft advice, e.g. rho_target outside [0.2, 0.4].
  std::vector<std::string> warnings() const;
};

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;

  void validate() const;
};

/// Per-matrix optimizer state. `momentum` starts at zero; `second_moment`
/// exists only once an Adam-family step has run.
struct OptState {
  Matrix momentum;
  std::optional<Matrix> second_moment;
  std::size_t step_count = 0;

  static OptState zeros(std::size_t rows, std::size_t cols) { return {Matrix(rows, cols), {}, 0}; }
  static OptState zeros_like(const Matrix& w) { return zeros(w.rows(), w.cols()); }
};

/// Optional by-products of a step that the harness records.
struct StepTrace {
  /// μ·M_k + (1−μ)·∇f before any normalization (Adam: the raw first moment).
  std::optional<Matrix> raw_momentum;
};

// GDM: M ← μM + (1−μ)g, W ← W − αM.
Matrix gdm_step(const Matrix& w, const Matrix& grad, OptState& state, double alpha, double mu,
                StepTrace* trace = nullptr);

// Naive REG: the momentum average is normalized in place and applied directly.
Matrix naive_reg_step(const Matrix& w, const Matrix& grad, OptState& state, double alpha, double mu,
                      NormOrder p, AxisPolicy policy = AxisPolicy::ShapeDriven,
                      StepTrace* trace = nullptr);

/// Full REG step: momentum average, normalization (single pass or iterated),
/// rescale to `rho_target` RMS, decoupled weight decay.
///
/// With the default momentum chain the state keeps the normalized matrix
/// (before the RMS rescale), so the next average mixes μ times a
/// unit-line matrix with the new gradient.
Matrix reg_step(const Matrix& w, const Matrix& grad, OptState& state, const RegConfig& cfg,
                StepTrace* trace = nullptr);

/// reg_step with `alpha` overriding cfg.alpha; alpha may be zero.
Matrix reg_step_with_lr(const Matrix& w, const Matrix& grad, OptState& state,
                        const RegConfig& cfg, double alpha, StepTrace* trace = nullptr);

/// Normalized gradient descent on the momentum average: W ← W − α M/‖M‖_F.
/// Throws ZeroGradient when the average vanishes.
Matrix ngd_step(const Matrix& w, const Matrix& grad, OptState& state, double alpha, double mu,
                StepTrace* trace = nullptr);

/// Bias-corrected Adam. Weight decay, if any, is added to the gradient (L2 form).
Matrix adam_step(const Matrix& w, const Matrix& grad, OptState& state, const AdamConfig& cfg,
                 StepTrace* trace = nullptr);

/// AdamW: W ← W − α(m̂/(√v̂+ε) + λW).
Matrix adamw_step(const Matrix& w, const Matrix& grad, OptState& state, const AdamConfig& cfg,
                  StepTrace* trace = nullptr);

enum class Assignment { Reg, AdamW };

std::string to_string(Assignment a);

struct ParamGroup {
  std::string name;
  Matrix weights;
  Assignment assignment = Assignment::Reg;
  OptState state;

  ParamGroup(std::string name, Matrix weights, Assignment assignment)
      : name(std::move(name)),
        weights(std::move(weights)),
        assignment(assignment),
        state(OptState::zeros_like(this->weights)) {}
};

/// Steps every group with the rule it is assigned. Groups are independent.
/// Throws ShapeMismatch naming the offending group.
void hybrid_step(std::vector<ParamGroup>& groups, std::span<const Matrix> grads,
                 const RegConfig& reg_cfg, const AdamConfig& adamw_cfg);

enum class Method { Gdm, NaiveReg, Reg, Ngd, Adam, AdamW };

std::string to_string(Method m);
Method parse_method(const std::string& text);

/// Uniform dispatch used by the benchmark harness. Gdm/NaiveReg/Ngd take
/// alpha, mu, p and policy from `reg`; Adam/AdamW use `adam`.
struct OptimizerConfig {
  Method method = Method::Reg;
  RegConfig reg{};
  AdamConfig adam{};

  void validate() const;
  double base_lr() const;
};

/// One step with the learning rate multiplied by `lr_scale` (schedules).
Matrix optimizer_step(const OptimizerConfig& cfg, const Matrix& w, const Matrix& grad,
                      OptState& state, double lr_scale = 1.0, StepTrace* trace = nullptr);

}  // namespace regopt
