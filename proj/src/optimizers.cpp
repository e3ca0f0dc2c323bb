#include "regopt/optimizers.hpp"

#include <cmath>

namespace regopt {

std::string to_string(RmsMode mode) {
  return mode == RmsMode::ClosedForm ? "closed_form" : "empirical";
}

std::string to_string(MomentumChain chain) {
  return chain == MomentumChain::Normalized ? "normalized" : "raw";
}

std::string to_string(NormalizationScheme scheme) {
  return scheme == NormalizationScheme::SinglePass ? "single_pass" : "alternating";
}

RmsMode parse_rms_mode(const std::string& text) {
  if (text == "closed_form") return RmsMode::ClosedForm;
  if (text == "empirical") return RmsMode::Empirical;
  throw ConfigInvalid("unknown rms_mode '" + text + "' (expected closed_form or empirical)");
}

MomentumChain parse_momentum_chain(const std::string& text) {
  if (text == "normalized") return MomentumChain::Normalized;
  if (text == "raw") return MomentumChain::Raw;
  throw ConfigInvalid("unknown momentum_chain '" + text + "' (expected normalized or raw)");
}

NormalizationScheme parse_normalization_scheme(const std::string& text) {
  if (text == "single_pass") return NormalizationScheme::SinglePass;
  if (text == "alternating") return NormalizationScheme::Alternating;
  throw ConfigInvalid("unknown scheme '" + text + "' (expected single_pass or alternating)");
}

std::string to_string(Assignment a) { return a == Assignment::Reg ? "reg" : "adamw"; }

std::string to_string(Method m) {
  switch (m) {
    case Method::Gdm:
      return "gdm";
    case Method::NaiveReg:
      return "naive_reg";
    case Method::Reg:
      return "reg";
    case Method::Ngd:
      return "ngd";
    case Method::Adam:
      return "adam";
    case Method::AdamW:
      return "adamw";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  for (Method m : {Method::Gdm, Method::NaiveReg, Method::Reg, Method::Ngd, Method::Adam,
                   Method::AdamW}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigInvalid("unknown optimizer '" + text +
                      "' (expected gdm, naive_reg, reg, ngd, adam or adamw)");
}

void RegConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigInvalid("alpha must be > 0");
  validate_rule();
}

void RegConfig::validate_rule() const {
  if (!(mu >= 0.0 && mu < 1.0)) throw ConfigInvalid("mu must lie in [0, 1)");
  if (!(rho_target > 0.0) || !std::isfinite(rho_target)) {
    throw ConfigInvalid("rho_target must be > 0");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigInvalid("weight_decay must be >= 0");
  }
  if (racs_iterations < 1) throw ConfigInvalid("racs iteration count t must be >= 1");
  if (scheme == NormalizationScheme::SinglePass && racs_iterations != 1) {
    throw ConfigInvalid("single_pass normalization requires t = 1; use scheme alternating");
  }
  if (rms_mode == RmsMode::ClosedForm &&
      (p != NormOrder::Two || scheme != NormalizationScheme::SinglePass ||
       policy != AxisPolicy::ShapeDriven)) {
    throw ConfigInvalid("closed_form rms requires p = 2 with single-pass shape-driven normalization");
  }
}

std::vector<std::string> RegConfig::warnings() const {
  std::vector<std::string> out;
  if (rho_target < 0.2 || rho_target > 0.4) {
    out.push_back("rho_target " + std::to_string(rho_target) +
                  " lies outside the usual [0.2, 0.4] range");
  }
  return out;
}

void AdamConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigInvalid("adam alpha must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigInvalid("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigInvalid("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigInvalid("epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigInvalid("adam weight_decay must be >= 0");
}

namespace {

Matrix finite_or_throw(Matrix m, const char* who) {
  if (!m.all_finite()) throw NonFiniteValue(std::string(who) + ": step produced NaN or Inf");
  return m;
}

// M' = μ·M + (1−μ)·g
Matrix momentum_average(const Matrix& momentum, const Matrix& grad, double mu) {
  Matrix out = momentum;
  out *= mu;
  const auto g = grad.data();
  auto o = out.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += (1.0 - mu) * g[k];
  return out;
}

void check_inputs(const Matrix& w, const Matrix& grad, const OptState& state, const char* who) {
  require_same_shape(w, grad, std::string(who) + " weights/gradient");
  require_same_shape(w, state.momentum, std::string(who) + " weights/momentum");
}

// W − α·direction − α·λ·W
Matrix apply_update(const Matrix& w, const Matrix& direction, double alpha, double weight_decay) {
  Matrix out = w;
  auto o = out.data();
  const auto d = direction.data();
  const auto x = w.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] -= alpha * (d[k] + weight_decay * x[k]);
  return out;
}

Matrix adam_family(const Matrix& w, const Matrix& grad, OptState& state, const AdamConfig& cfg,
                   bool decoupled, StepTrace* trace, const char* who) {
  check_inputs(w, grad, state, who);
  if (!state.second_moment) state.second_moment = Matrix(w.rows(), w.cols());
  require_same_shape(w, *state.second_moment, std::string(who) + " weights/second moment");

  Matrix g = grad;
  if (!decoupled && cfg.weight_decay != 0.0) g += w * cfg.weight_decay;

  const std::size_t k = state.step_count + 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(k));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(k));

  auto m = state.momentum.data();
  auto v = state.second_moment->data();
  const auto gd = g.data();
  Matrix direction(w.rows(), w.cols());
  auto d = direction.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gd[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gd[i] * gd[i];
    d[i] = (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
  }
  state.step_count = k;
  if (trace) trace->raw_momentum = state.momentum;
  return finite_or_throw(apply_update(w, direction, cfg.alpha, decoupled ? cfg.weight_decay : 0.0),
                         who);
}

}  // namespace

Matrix gdm_step(const Matrix& w, const Matrix& grad, OptState& state, double alpha, double mu,
                StepTrace* trace) {
  check_inputs(w, grad, state, "gdm_step");
  state.momentum = momentum_average(state.momentum, grad, mu);
  ++state.step_count;
  if (trace) trace->raw_momentum = state.momentum;
  return finite_or_throw(apply_update(w, state.momentum, alpha, 0.0), "gdm_step");
}

Matrix naive_reg_step(const Matrix& w, const Matrix& grad, OptState& state, double alpha,
                      double mu, NormOrder p, AxisPolicy policy, StepTrace* trace) {
  check_inputs(w, grad, state, "naive_reg_step");
  Matrix raw = momentum_average(state.momentum, grad, mu);
  state.momentum = normal(raw, p, policy);
  ++state.step_count;
  if (trace) trace->raw_momentum = std::move(raw);
  return finite_or_throw(apply_update(w, state.momentum, alpha, 0.0), "naive_reg_step");
}

Matrix reg_step(const Matrix& w, const Matrix& grad, OptState& state, const RegConfig& cfg,
                StepTrace* trace) {
  cfg.validate();
  return reg_step_with_lr(w, grad, state, cfg, cfg.alpha, trace);
}

Matrix reg_step_with_lr(const Matrix& w, const Matrix& grad, OptState& state,
                        const RegConfig& cfg, double alpha, StepTrace* trace) {
  check_inputs(w, grad, state, "reg_step");
  cfg.validate_rule();
  Matrix raw = momentum_average(state.momentum, grad, cfg.mu);
  Matrix normalized = cfg.scheme == NormalizationScheme::SinglePass
                          ? normal(raw, cfg.p, cfg.policy)
                          : racs_iterate(raw, cfg.p, cfg.racs_iterations);

  const double current_rms =
      cfg.rms_mode == RmsMode::ClosedForm ? rms_closed_form(w.rows(), w.cols()) : rms(normalized);
  Matrix rescaled = normalized;
  if (current_rms > 0.0) rescaled *= cfg.rho_target / current_rms;

  Matrix next = apply_update(w, rescaled, alpha, cfg.weight_decay);
  state.momentum = cfg.momentum_chain == MomentumChain::Normalized ? std::move(normalized) : raw;
  ++state.step_count;
  if (trace) trace->raw_momentum = std::move(raw);
  return finite_or_throw(std::move(next), "reg_step");
}

Matrix ngd_step(const Matrix& w, const Matrix& grad, OptState& state, double alpha, double mu,
                StepTrace* trace) {
  check_inputs(w, grad, state, "ngd_step");
  Matrix avg = momentum_average(state.momentum, grad, mu);
  const double fro = frobenius_norm(avg);
  if (fro == 0.0) throw ZeroGradient("ngd_step: momentum average is zero");
  Matrix direction = avg;
  direction *= 1.0 / fro;
  state.momentum = std::move(avg);
  ++state.step_count;
  if (trace) trace->raw_momentum = state.momentum;
  return finite_or_throw(apply_update(w, direction, alpha, 0.0), "ngd_step");
}

Matrix adam_step(const Matrix& w, const Matrix& grad, OptState& state, const AdamConfig& cfg,
                 StepTrace* trace) {
  return adam_family(w, grad, state, cfg, false, trace, "adam_step");
}

Matrix adamw_step(const Matrix& w, const Matrix& grad, OptState& state, const AdamConfig& cfg,
                  StepTrace* trace) {
  return adam_family(w, grad, state, cfg, true, trace, "adamw_step");
}

void hybrid_step(std::vector<ParamGroup>& groups, std::span<const Matrix> grads,
                 const RegConfig& reg_cfg, const AdamConfig& adamw_cfg) {
  if (grads.size() != groups.size()) {
    throw ShapeMismatch("hybrid_step: " + std::to_string(grads.size()) + " gradients for " +
                        std::to_string(groups.size()) + " groups");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].weights.same_shape(grads[i])) {
      throw ShapeMismatch("hybrid_step: gradient shape mismatch in group '" + groups[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto& g = groups[i];
    g.weights = g.assignment == Assignment::Reg ? reg_step(g.weights, grads[i], g.state, reg_cfg)
                                                : adamw_step(g.weights, grads[i], g.state, adamw_cfg);
  }
}

void OptimizerConfig::validate() const {
  switch (method) {
    case Method::Reg:
      reg.validate();
      break;
    case Method::Gdm:
    case Method::NaiveReg:
    case Method::Ngd:
      if (!(reg.alpha > 0.0)) throw ConfigInvalid("alpha must be > 0");
      if (!(reg.mu >= 0.0 && reg.mu < 1.0)) throw ConfigInvalid("mu must lie in [0, 1)");
      break;
    case Method::Adam:
    case Method::AdamW:
      adam.validate();
      break;
  }
}

double OptimizerConfig::base_lr() const {
  return method == Method::Adam || method == Method::AdamW ? adam.alpha : reg.alpha;
}

Matrix optimizer_step(const OptimizerConfig& cfg, const Matrix& w, const Matrix& grad,
                      OptState& state, double lr_scale, StepTrace* trace) {
  switch (cfg.method) {
    case Method::Gdm:
      return gdm_step(w, grad, state, cfg.reg.alpha * lr_scale, cfg.reg.mu, trace);
    case Method::NaiveReg:
      return naive_reg_step(w, grad, state, cfg.reg.alpha * lr_scale, cfg.reg.mu, cfg.reg.p,
                            cfg.reg.policy, trace);
    case Method::Reg:
      return reg_step_with_lr(w, grad, state, cfg.reg, cfg.reg.alpha * lr_scale, trace);
    case Method::Ngd:
      return ngd_step(w, grad, state, cfg.reg.alpha * lr_scale, cfg.reg.mu, trace);
    case Method::Adam: {
      AdamConfig scaled = cfg.adam;
      scaled.alpha *= lr_scale;
      return adam_step(w, grad, state, scaled, trace);
    }
    case Method::AdamW: {
      AdamConfig scaled = cfg.adam;
      scaled.alpha *= lr_scale;
      return adamw_step(w, grad, state, scaled, trace);
    }
  }
  throw ConfigInvalid("unknown optimizer method");
}

}  // namespace regopt
