#include "regopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace regopt {

using nlohmann::json;

double Schedule::multiplier(std::size_t k, std::size_t n) const {
  if (kind == ScheduleKind::Constant || n <= 1) return 1.0;
  const auto warmup = static_cast<std::size_t>(std::lround(warmup_fraction * static_cast<double>(n)));
  if (k < warmup) return static_cast<double>(k) / static_cast<double>(warmup);
  if (n - 1 <= warmup) return 1.0;
  const double progress =
      static_cast<double>(k - warmup) / static_cast<double>(n - 1 - warmup);
  return 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Reads typed fields out of a JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigInvalid(where_ + ": expected a JSON object");
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.push_back(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigInvalid(where_ + "." + key + ": " + e.what());
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.push_back(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ConfigInvalid(where_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

NormOrder norm_from_json(const json& j) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (v == 1.0) return NormOrder::One;
    if (v == 2.0) return NormOrder::Two;
    throw ConfigInvalid("norm order must be 1, 2 or \"inf\"");
  }
  if (j.is_string()) return parse_norm_order(j.get<std::string>());
  throw ConfigInvalid("norm order must be 1, 2 or \"inf\"");
}

json norm_to_json(NormOrder p) {
  return p == NormOrder::Inf ? json("inf") : json(p == NormOrder::One ? 1 : 2);
}

AdamConfig adam_from_json(const json& j, const std::string& where) {
  Fields f(j, where);
  AdamConfig a;
  a.alpha = f.get("alpha", a.alpha);
  a.beta1 = f.get("beta1", a.beta1);
  a.beta2 = f.get("beta2", a.beta2);
  a.epsilon = f.get("epsilon", a.epsilon);
  a.weight_decay = f.get("weight_decay", a.weight_decay);
  f.finish();
  return a;
}

json adam_to_json(const AdamConfig& a) {
  return {{"alpha", a.alpha}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"epsilon", a.epsilon},
          {"weight_decay", a.weight_decay}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  Fields top(j, "config");
  ExperimentConfig c;
  if (top.has("problem")) c.problem = top.raw("problem");
  if (!c.problem.is_object() || !c.problem.contains("name")) {
    throw ConfigInvalid("config.problem must be an object with a name");
  }

  if (top.has("optimizer")) {
    Fields o(top.raw("optimizer"), "optimizer");
    OptimizerConfig& opt = c.optimizer;
    opt.method = parse_method(o.get<std::string>("name", "reg"));
    const bool adam_like = opt.method == Method::Adam || opt.method == Method::AdamW;
    RegConfig& r = opt.reg;
    AdamConfig& a = opt.adam;
    if (adam_like) {
      a.alpha = o.get("alpha", a.alpha);
      a.weight_decay = o.get("weight_decay", a.weight_decay);
      a.beta1 = o.get("beta1", a.beta1);
      a.beta2 = o.get("beta2", a.beta2);
      a.epsilon = o.get("epsilon", a.epsilon);
    } else {
      r.alpha = o.get("alpha", r.alpha);
      r.weight_decay = o.get("weight_decay", r.weight_decay);
      r.mu = o.get("mu", r.mu);
      if (o.has("p")) r.p = norm_from_json(o.raw("p"));
      r.rho_target = o.get("rho_target", r.rho_target);
      r.racs_iterations = o.get<std::size_t>("t", r.racs_iterations);
      r.policy = parse_axis_policy(o.get<std::string>("policy", to_string(r.policy)));
      r.scheme = parse_normalization_scheme(o.get<std::string>("scheme", to_string(r.scheme)));
      r.rms_mode = parse_rms_mode(o.get<std::string>("rms_mode", to_string(r.rms_mode)));
      r.momentum_chain =
          parse_momentum_chain(o.get<std::string>("momentum_chain", to_string(r.momentum_chain)));
    }
    if (o.has("hybrid")) {
      Fields h(o.raw("hybrid"), "optimizer.hybrid");
      c.adamw_groups = h.get<std::vector<std::string>>("adamw_groups", {});
      if (h.has("adamw")) c.hybrid_adamw = adam_from_json(h.raw("adamw"), "optimizer.hybrid.adamw");
      h.finish();
    }
    o.finish();
  }

  if (top.has("schedule")) {
    Fields s(top.raw("schedule"), "schedule");
    const auto kind = s.get<std::string>("kind", "constant");
    if (kind == "constant") {
      c.schedule.kind = ScheduleKind::Constant;
    } else if (kind == "cosine") {
      c.schedule.kind = ScheduleKind::CosineWithWarmup;
    } else {
      throw ConfigInvalid("schedule.kind must be constant or cosine");
    }
    c.schedule.warmup_fraction = s.get("warmup_fraction", c.schedule.warmup_fraction);
    s.finish();
  }

  c.iterations = top.get<std::size_t>("iterations", c.iterations);
  c.seed = top.get<std::uint64_t>("seed", c.seed);
  c.output_dir = top.get<std::string>("output_dir", c.output_dir);
  if (top.has("threshold")) c.threshold = top.get<double>("threshold", 0.0);
  top.finish();
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json opt = {{"name", to_string(optimizer.method)}};
  if (optimizer.method == Method::Adam || optimizer.method == Method::AdamW) {
    const auto& a = optimizer.adam;
    opt.update({{"alpha", a.alpha}, {"weight_decay", a.weight_decay}, {"beta1", a.beta1},
                {"beta2", a.beta2}, {"epsilon", a.epsilon}});
  } else {
    const auto& r = optimizer.reg;
    opt.update({{"alpha", r.alpha},
                {"weight_decay", r.weight_decay},
                {"mu", r.mu},
                {"p", norm_to_json(r.p)},
                {"rho_target", r.rho_target},
                {"t", r.racs_iterations},
                {"policy", to_string(r.policy)},
                {"scheme", to_string(r.scheme)},
                {"rms_mode", to_string(r.rms_mode)},
                {"momentum_chain", to_string(r.momentum_chain)}});
  }
  if (!adamw_groups.empty()) {
    opt["hybrid"] = {{"adamw_groups", adamw_groups}, {"adamw", adam_to_json(hybrid_adamw)}};
  }
  json j = {{"problem", problem},
            {"optimizer", opt},
            {"schedule",
             {{"kind", schedule.kind == ScheduleKind::Constant ? "constant" : "cosine"},
              {"warmup_fraction", schedule.warmup_fraction}}},
            {"iterations", iterations},
            {"seed", seed},
            {"output_dir", output_dir}};
  if (threshold) j["threshold"] = *threshold;
  return j;
}

void ExperimentConfig::validate() const {
  optimizer.validate();
  if (iterations < 1) throw ConfigInvalid("iterations must be >= 1");
  if (!(schedule.warmup_fraction >= 0.0 && schedule.warmup_fraction < 1.0)) {
    throw ConfigInvalid("schedule.warmup_fraction must lie in [0, 1)");
  }
  if (!adamw_groups.empty()) {
    if (optimizer.method != Method::Reg) {
      throw ConfigInvalid("hybrid adamw_groups are only supported with the reg optimizer");
    }
    hybrid_adamw.validate();
  }
}

namespace {

std::size_t size_param(Fields& f, const std::string& key, std::size_t fallback) {
  const auto v = f.get<long long>(key, static_cast<long long>(fallback));
  if (v <= 0) throw ConfigInvalid("problem." + key + " must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

Problem build_problem(const json& spec, std::uint64_t seed) {
  Fields f(spec, "problem");
  const auto name = f.get<std::string>("name", "");
  Problem p;
  if (name == "quadratic") {
    const auto m = size_param(f, "m", 4);
    const auto n = size_param(f, "n", 8);
    f.finish();
    p = random_quadratic(m, n, seed);
    p.name = "quadratic";
  } else if (name == "identity_quadratic") {
    const auto m = size_param(f, "m", 4);
    const auto n = size_param(f, "n", 8);
    f.finish();
    p = quadratic_problem(Matrix::identity(m), Matrix::identity(n), Matrix(m, n));
    p.name = "identity_quadratic";
  } else if (name == "logistic") {
    const auto samples = size_param(f, "samples", 512);
    const auto features = size_param(f, "features", 16);
    const auto classes = size_param(f, "classes", 4);
    const double separation = f.get("separation", 1.0);
    f.finish();
    if (classes == 1) {
      Dataset d = make_blobs(samples, features, 2, separation, seed);
      std::vector<int> y(d.labels.size());
      std::transform(d.labels.begin(), d.labels.end(), y.begin(), [](int l) { return l ? 1 : -1; });
      p = logistic_problem(with_bias_column(d.x), y, 1);
    } else {
      Dataset d = make_blobs(samples, features, classes, separation, seed);
      p = logistic_problem(with_bias_column(d.x), d.labels, classes);
    }
  } else if (name == "mlp") {
    MlpSpec s;
    s.inputs = size_param(f, "inputs", s.inputs);
    s.hidden = size_param(f, "hidden", s.hidden);
    s.outputs = size_param(f, "outputs", s.outputs);
    s.samples = size_param(f, "samples", s.samples);
    s.separation = f.get("separation", s.separation);
    const auto loss = f.get<std::string>("loss", "cross_entropy");
    if (loss == "cross_entropy") {
      s.loss = MlpLoss::CrossEntropy;
    } else if (loss == "mse") {
      s.loss = MlpLoss::MeanSquared;
    } else {
      throw ConfigInvalid("problem.loss must be cross_entropy or mse");
    }
    f.finish();
    p = mlp_problem(s, seed);
  } else if (name == "rosenbrock") {
    const auto m = size_param(f, "m", 2);
    const auto n = size_param(f, "n", 4);
    f.finish();
    p = rosenbrock_matrix(m, n);
  } else {
    throw ConfigInvalid("unknown problem '" + name +
                        "' (expected quadratic, identity_quadratic, logistic, mlp or rosenbrock)");
  }
  return p;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem problem = build_problem(cfg.problem, cfg.seed);
  Params w = problem.init(splitmix64(cfg.seed));
  problem.check_params(w);

  for (const auto& g : cfg.adamw_groups) {
    const bool known = std::any_of(problem.blocks.begin(), problem.blocks.end(),
                                   [&](const BlockInfo& b) { return b.name == g; });
    if (!known) throw ConfigInvalid("hybrid group '" + g + "' is not a block of " + problem.name);
  }
  OptimizerConfig adamw_cfg;
  adamw_cfg.method = Method::AdamW;
  adamw_cfg.adam = cfg.hybrid_adamw;
  std::vector<const OptimizerConfig*> rule;
  std::vector<OptState> state;
  for (const auto& b : problem.blocks) {
    const bool adamw = std::find(cfg.adamw_groups.begin(), cfg.adamw_groups.end(), b.name) !=
                       cfg.adamw_groups.end();
    rule.push_back(adamw ? &adamw_cfg : &cfg.optimizer);
    state.push_back(OptState::zeros(b.rows, b.cols));
  }

  const bool reg_family = cfg.optimizer.method != Method::Adam && cfg.optimizer.method != Method::AdamW;
  const double lyap_c = reg_family ? cfg.optimizer.reg.alpha * cfg.optimizer.reg.mu /
                                         (2.0 * (1.0 - cfg.optimizer.reg.mu))
                                   : 0.0;
  double total = 0.0;
  for (const auto& b : problem.blocks) total += static_cast<double>(b.rows * b.cols);

  RunResult out;
  RunRecord& rec = out.record;
  rec.config = cfg.to_json();
  rec.seed = cfg.seed;
  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    const double f = problem.value(w);
    if (!std::isfinite(f)) {
      out.status = "diverged";
      break;
    }
    const Params grads = problem.gradient(w);
    double grad_sq = 0.0, g_sum = 0.0, mom_sq = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) {
      grad_sq += std::pow(frobenius_norm(grads[b]), 2);
      g_sum += row_norm_sum(grads[b]);
      mom_sq += std::pow(frobenius_norm(state[b].momentum), 2);
    }

    const double scale = cfg.schedule.multiplier(k, cfg.iterations);
    Params next;
    double h_sum = 0.0, step_sq = 0.0;
    try {
      for (std::size_t b = 0; b < w.size(); ++b) {
        StepTrace trace;
        next.push_back(optimizer_step(*rule[b], w[b], grads[b], state[b], scale, &trace));
        h_sum += row_norm_sum(*trace.raw_momentum);
        step_sq += std::pow(frobenius_norm(w[b] - next[b]), 2);
      }
    } catch (const NonFiniteValue&) {
      out.status = "diverged";
      break;
    }

    rec.f.push_back(f);
    rec.grad_fro.push_back(std::sqrt(grad_sq));
    rec.g.push_back(g_sum);
    rec.h.push_back(h_sum);
    rec.lyapunov.push_back(f + lyap_c * mom_sq);
    rec.update_rms.push_back(std::sqrt(step_sq / total));
    rec.lr.push_back(cfg.optimizer.base_lr() * scale);
    w = std::move(next);
  }
  out.final_params = std::move(w);
  return out;
}

void write_csv(std::ostream& out, const RunRecord& r) {
  out << kCsvHeader << '\n';
  char buf[512];
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, r.f[k],
                  r.grad_fro[k], r.g[k], r.h[k], r.update_rms[k], r.lr[k]);
    out << buf;
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "regopt_out";
}

std::filesystem::path run_to_disk(const ExperimentConfig& cfg, RunResult* result) {
  RunResult r = run_experiment(cfg);
  const std::filesystem::path dir = cfg.output_dir.empty() ? default_output_dir() : std::filesystem::path(cfg.output_dir);
  std::ostringstream csv;
  write_csv(csv, r.record);
  const auto csv_path = dir / "run.csv";
  write_file_atomic(csv_path, csv.str());
  json meta = {{"csv_schema", kCsvSchemaVersion}, {"status", r.status},
               {"rows", r.record.size()}, {"config", r.record.config}};
  write_file_atomic(dir / "run.json", meta.dump(2) + "\n");
  if (result) *result = std::move(r);
  return csv_path;
}

Grid parse_grid(const json& j) {
  if (!j.is_object() || j.empty()) throw ConfigInvalid("grid must be a non-empty object");
  Grid grid;
  for (const auto& [key, values] : j.items()) {
    if (!values.is_array() || values.empty()) {
      throw ConfigInvalid("grid entry '" + key + "' must be a non-empty array");
    }
    grid.emplace_back(key, std::vector<json>(values.begin(), values.end()));
  }
  return grid;
}

namespace {

json::json_pointer pointer_for(const std::string& dotted) {
  std::string ptr;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const auto dot = dotted.find('.', start);
    const auto part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigInvalid("bad grid key '" + dotted + "'");
    ptr += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(ptr);
}

std::string cell(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SweepResult sweep(const json& base, const Grid& grid, const std::filesystem::path& out_dir,
                  std::size_t workers) {
  if (grid.empty()) throw ConfigInvalid("sweep: grid is empty");
  std::size_t points = 1;
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigInvalid("sweep: grid entry '" + key + "' has no values");
    points *= values.size();
  }

  SweepResult result;
  for (const auto& [key, _] : grid) result.keys.push_back(key);

  // Build and validate every point up front so config errors surface before any work.
  std::vector<ExperimentConfig> configs;
  for (std::size_t idx = 0; idx < points; ++idx) {
    json cfg = base;
    SweepRow row;
    row.point = idx;
    std::size_t rest = idx;
    for (std::size_t g = grid.size(); g-- > 0;) {
      const auto& values = grid[g].second;
      const json& v = values[rest % values.size()];
      rest /= values.size();
      cfg[pointer_for(grid[g].first)] = v;
      row.values.insert(row.values.begin(), v);
    }
    configs.push_back(ExperimentConfig::from_json(cfg));
    result.rows.push_back(std::move(row));
  }

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, points);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t idx = next++; idx < points; idx = next++) {
      try {
        RunResult r = run_experiment(configs[idx]);
        std::ostringstream csv;
        write_csv(csv, r.record);
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu.csv", idx);
        write_file_atomic(out_dir / name, csv.str());

        SweepRow& row = result.rows[idx];
        row.status = r.status;
        const auto& f = r.record.f;
        const auto& g = r.record.g;
        row.final_f = f.empty() ? std::nan("") : f.back();
        row.min_f = f.empty() ? std::nan("") : *std::min_element(f.begin(), f.end());
        row.min_g = g.empty() ? std::nan("") : *std::min_element(g.begin(), g.end());
        if (configs[idx].threshold) {
          for (std::size_t k = 0; k < f.size(); ++k) {
            if (f[k] <= *configs[idx].threshold) {
              row.iterations_to_threshold = k;
              break;
            }
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::ostringstream summary;
  write_summary_csv(summary, result);
  write_file_atomic(out_dir / "summary.csv", summary.str());
  return result;
}

void write_summary_csv(std::ostream& out, const SweepResult& result) {
  out << "point";
  for (const auto& k : result.keys) out << ',' << k;
  out << ",final_f,min_f,min_g_k,iters_to_threshold,status\n";
  for (const auto& row : result.rows) {
    out << row.point;
    for (const auto& v : row.values) out << ',' << cell(v);
    out << ',' << fmt17(row.final_f) << ',' << fmt17(row.min_f) << ',' << fmt17(row.min_g) << ',';
    if (row.iterations_to_threshold) out << *row.iterations_to_threshold;
    out << ',' << row.status << '\n';
  }
}

std::vector<TheoremReport> run_verification(std::optional<TheoremId> only, std::uint64_t seed) {
  auto wanted = [&](TheoremId id) { return !only || *only == id; };
  std::vector<TheoremReport> out;

  for (TheoremId id : {TheoremId::T1a, TheoremId::T1b}) {
    if (!wanted(id)) continue;
    MinimalityOptions opts;
    opts.seed = seed;
    out.push_back(check_equilibration_minimality(id, opts));
  }

  if (wanted(TheoremId::T2)) {
    std::vector<std::pair<std::size_t, std::size_t>> shapes = {
        {1, 1}, {1, 16}, {16, 1}, {8, 8}, {8, 16}, {16, 8}, {3, 100}, {100, 3}, {64, 32}, {128, 256}};
    out.push_back(check_rms_theorem(shapes, 10000, seed));
  }

  if (wanted(TheoremId::T3)) {
    const Problem q = random_quadratic(4, 8, seed);
    for (NormOrder p : {NormOrder::One, NormOrder::Two, NormOrder::Inf}) {
      DescentOptions d;
      d.p = p;
      d.seed = seed;
      out.push_back(check_descent_mu0(q, d));
      const auto eq = norm_equivalence(p, normalized_line_length(4, 8));
      const double alpha = 1.0 / (*q.lipschitz * eq.gamma * eq.gamma);
      out.push_back(check_gamma_bounds_run(q, p, alpha, 1000, seed).report);
    }
  }

  if (wanted(TheoremId::T4)) {
    for (std::size_t m : {2, 4, 8}) {
      const Problem q = random_quadratic(m, 2 * m, seed + m);
      for (double mu : {0.5, 0.9, 0.99}) {
        for (double alpha : {1e-3, 1e-2}) {
          MomentumBoundOptions o;
          o.mu = mu;
          o.alpha = alpha;
          o.iterations = 10000;
          o.seed = seed;
          for (auto& r : check_finite_n_bound(q, o)) out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

PlotSeries read_run_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError(path.string() + ": expected header '" + std::string(kCsvHeader) + "'");
  }
  PlotSeries s;
  s.label = path.stem().string();
  if (path.has_parent_path() && s.label == "run") s.label = path.parent_path().filename().string();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad value");
      cols.push_back(v);
    }
    if (cols.size() != 7) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 7 columns");
    s.iter.push_back(cols[0]);
    s.f.push_back(cols[1]);
    s.g.push_back(cols[3]);
  }
  return s;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void panel(std::ostringstream& svg, const std::vector<PlotSeries>& series, bool use_f, bool log_y,
           double top, const std::string& title) {
  constexpr double left = 80, width = 680, height = 220;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  auto ty = [&](double v) {
    if (!log_y) return v;
    return std::log10(std::max(v, 1e-300));
  };
  for (const auto& s : series) {
    const auto& ys = use_f ? s.f : s.g;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (!std::isfinite(ys[k]) || (log_y && ys[k] <= 0.0)) continue;
      xmin = std::min(xmin, s.iter[k]);
      xmax = std::max(xmax, s.iter[k]);
      ymin = std::min(ymin, ty(ys[k]));
      ymax = std::max(ymax, ty(ys[k]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * width; };
  auto py = [&](double y) { return top + height - (y - ymin) / (ymax - ymin) * height; };

  svg << "<text x=\"" << left + width / 2 << "\" y=\"" << top - 8
      << "\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\""
      << height << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double label_y = log_y ? std::pow(10.0, fy) : fy;
    svg << "<line x1=\"" << left << "\" x2=\"" << left + width << "\" y1=\"" << py(fy) << "\" y2=\""
        << py(fy) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(label_y) << "</text>\n";
    svg << "<text x=\"" << px(fx) << "\" y=\"" << top + height + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(fx) << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const auto& ys = use_f ? s.f : s.g;
    // Thin long runs to at most ~2000 vertices per polyline.
    const std::size_t stride = std::max<std::size_t>(1, ys.size() / 2000);
    svg << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[i % 8]
        << "\" points=\"";
    for (std::size_t k = 0; k < ys.size(); k += stride) {
      if (!std::isfinite(ys[k]) || (log_y && ys[k] <= 0.0)) continue;
      svg << num(px(s.iter[k])) << ',' << num(py(ty(ys[k]))) << ' ';
    }
    svg << "\"/>\n";
  }
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, bool log_y) {
  std::ostringstream svg;
  const double legend_h = 20.0 * static_cast<double>(series.size());
  const double total_h = 600 + legend_h;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << total_h
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(svg, series, true, log_y, 40, log_y ? "loss f (log scale)" : "loss f");
  panel(svg, series, false, log_y, 330, log_y ? "g_k (log scale)" : "g_k");
  svg << "<text x=\"420\" y=\"590\" text-anchor=\"middle\" font-size=\"12\">iteration</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = 610 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"90\" x2=\"120\" y1=\"" << y - 4 << "\" y2=\"" << y - 4 << "\" stroke=\""
        << kPalette[i % 8] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"128\" y=\"" << y << "\" font-size=\"12\">" << xml_escape(series[i].label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace regopt
