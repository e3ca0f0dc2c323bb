#include "regopt/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace regopt {

void Problem::check_params(const Params& params) const {
  if (params.size() != blocks.size()) {
    throw ShapeMismatch(name + ": expected " + std::to_string(blocks.size()) +
                        " parameter blocks, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (params[i].rows() != blocks[i].rows || params[i].cols() != blocks[i].cols) {
      throw ShapeMismatch(name + ": block '" + blocks[i].name + "' expects " +
                          std::to_string(blocks[i].rows) + "x" + std::to_string(blocks[i].cols));
    }
  }
}

namespace {

// Orthogonal projector onto the span of the columns of u with sigma above tolerance.
Matrix range_projector(const Svd& svd, std::size_t dim) {
  const double tol = svd.sigma.front() * static_cast<double>(dim) *
                     std::numeric_limits<double>::epsilon();
  Matrix p(svd.u.rows(), svd.u.rows());
  for (std::size_t k = 0; k < svd.sigma.size(); ++k) {
    if (!(svd.sigma[k] > tol)) continue;
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < p.cols(); ++j) p(i, j) += svd.u(i, k) * svd.u(j, k);
  }
  return p;
}

double softplus(double z) {
  // log(1 + e^z) without overflow
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Row-wise softmax in place; returns Σ_i −log p_{i, label_i}.
double softmax_rows(Matrix& z, const std::vector<int>& labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto r = z.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double sum = 0.0;
    for (double& v : r) {
      v = std::exp(v - mx);
      sum += v;
    }
    const double log_sum = std::log(sum) + mx;
    loss += log_sum - (std::log(r[static_cast<std::size_t>(labels[i])]) + mx);
    for (double& v : r) v /= sum;
  }
  return loss;
}

Params random_init(const std::vector<BlockInfo>& blocks, std::uint64_t seed,
                   const std::vector<double>& stddev) {
  std::mt19937_64 rng(seed);
  Params out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.push_back(random_normal(blocks[i].rows, blocks[i].cols, rng, stddev[i]));
  }
  return out;
}

}  // namespace

Problem quadratic_problem(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.rows() != c.rows() || b.cols() != c.cols()) {
    throw ShapeMismatch("quadratic_problem: A is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + ", B is " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()) + ", C is " + std::to_string(c.rows()) + "x" +
                        std::to_string(c.cols()));
  }
  const std::size_t m = a.cols();
  const std::size_t n = b.rows();

  const Svd sa = svd_small(a);
  const Svd sb = svd_small(b.transpose());
  const double lipschitz = sa.sigma.front() * sa.sigma.front() * sb.sigma.front() * sb.sigma.front();

  // Best reachable residual: C minus its projection onto range(A) on the left
  // and the row space of B on the right.
  const Matrix pa = range_projector(sa, std::max(a.rows(), a.cols()));
  const Matrix pb = range_projector(sb, std::max(b.rows(), b.cols()));
  const Matrix residual = c - matmul(matmul(pa, c), pb);
  const double fr = frobenius_norm(residual);
  const double f_star = 0.5 * fr * fr;

  auto data = std::make_shared<const std::array<Matrix, 3>>(std::array<Matrix, 3>{a, b, c});

  Problem p;
  p.name = "quadratic";
  p.blocks = {{"W", m, n}};
  p.lipschitz = lipschitz;
  p.f_star = f_star;
  p.value = [data](const Params& w) {
    const auto& [A, B, C] = *data;
    const Matrix r = matmul(matmul(A, w.front()), B) - C;
    const double fr = frobenius_norm(r);
    return 0.5 * fr * fr;
  };
  p.gradient = [data](const Params& w) {
    const auto& [A, B, C] = *data;
    const Matrix r = matmul(matmul(A, w.front()), B) - C;
    return Params{matmul_nt(matmul_tn(A, r), B)};
  };
  p.init = [blocks = p.blocks](std::uint64_t seed) { return random_init(blocks, seed, {1.0}); };
  return p;
}

Problem random_quadratic(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t q = m + 2;
  const std::size_t r = n + 2;
  Matrix a = random_normal(q, m, rng, 1.0 / std::sqrt(static_cast<double>(q)));
  Matrix b = random_normal(n, r, rng, 1.0 / std::sqrt(static_cast<double>(r)));
  Matrix c = random_normal(q, r, rng);
  Problem p = quadratic_problem(a, b, c);
  p.name = "random_quadratic";
  return p;
}

Problem logistic_problem(const Matrix& x, const std::vector<int>& labels, std::size_t classes) {
  if (labels.size() != x.rows()) {
    throw ShapeMismatch("logistic_problem: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(x.rows()) + " samples");
  }
  if (classes == 0) throw ConfigInvalid("logistic_problem: classes must be >= 1");
  for (int y : labels) {
    const bool ok = classes == 1 ? (y == 1 || y == -1)
                                 : (y >= 0 && static_cast<std::size_t>(y) < classes);
    if (!ok) throw ConfigInvalid("logistic_problem: label " + std::to_string(y) + " out of range");
  }
  const double s = static_cast<double>(x.rows());
  const double sigma = singular_values(x).front();

  auto xs = std::make_shared<const Matrix>(x);
  auto ys = std::make_shared<const std::vector<int>>(labels);

  Problem p;
  p.name = "logistic";
  p.blocks = {{"W", classes, x.cols()}};
  p.lipschitz = sigma * sigma / ((classes == 1 ? 4.0 : 2.0) * s);
  p.f_star = 0.0;
  if (classes == 1) {
    p.value = [xs, ys, s](const Params& w) {
      const Matrix z = matmul_nt(*xs, w.front());  // s×1
      double loss = 0.0;
      for (std::size_t i = 0; i < z.rows(); ++i) loss += softplus(-(*ys)[i] * z(i, 0));
      return loss / s;
    };
    p.gradient = [xs, ys, s](const Params& w) {
      const Matrix z = matmul_nt(*xs, w.front());
      Matrix coef(z.rows(), 1);
      for (std::size_t i = 0; i < z.rows(); ++i) {
        const double y = (*ys)[i];
        coef(i, 0) = -y * sigmoid(-y * z(i, 0)) / s;
      }
      return Params{matmul_tn(coef, *xs)};
    };
  } else {
    p.value = [xs, ys, s](const Params& w) {
      Matrix z = matmul_nt(*xs, w.front());  // s×classes
      return softmax_rows(z, *ys) / s;
    };
    p.gradient = [xs, ys, s](const Params& w) {
      Matrix z = matmul_nt(*xs, w.front());
      softmax_rows(z, *ys);
      for (std::size_t i = 0; i < z.rows(); ++i) z(i, static_cast<std::size_t>((*ys)[i])) -= 1.0;
      z *= 1.0 / s;
      return Params{matmul_tn(z, *xs)};
    };
  }
  p.init = [blocks = p.blocks](std::uint64_t seed) { return random_init(blocks, seed, {0.01}); };
  return p;
}

Dataset make_blobs(std::size_t samples, std::size_t features, std::size_t classes,
                   double separation, std::uint64_t seed) {
  if (samples == 0 || features == 0 || classes == 0) {
    throw ConfigInvalid("make_blobs: samples, features and classes must be positive");
  }
  std::mt19937_64 rng(seed);
  const Matrix centers = random_normal(classes, features, rng, separation);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d{Matrix(samples, features), std::vector<int>(samples), classes};
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t k = i % classes;
    d.labels[i] = static_cast<int>(k);
    for (std::size_t j = 0; j < features; ++j) d.x(i, j) = centers(k, j) + noise(rng);
  }
  return d;
}

Matrix with_bias_column(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1, 1.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    std::copy(x.row(i).begin(), x.row(i).end(), out.row(i).begin());
  return out;
}

namespace {

struct MlpData {
  Matrix xb;  // samples × (inputs + 1)
  std::vector<int> labels;
  std::size_t hidden;
  std::size_t outputs;
  MlpLoss loss;
};

struct Forward {
  Matrix hb;  // tanh activations with bias column
  Matrix z;   // outputs (probabilities for cross-entropy)
  double loss;
};

Forward forward(const MlpData& d, const Params& w) {
  const double s = static_cast<double>(d.xb.rows());
  Matrix h = matmul_nt(d.xb, w[0]);
  for (double& v : h.data()) v = std::tanh(v);
  Matrix hb = with_bias_column(h);
  Matrix z = matmul_nt(hb, w[1]);
  double loss = 0.0;
  if (d.loss == MlpLoss::CrossEntropy) {
    loss = softmax_rows(z, d.labels) / s;
  } else {
    for (std::size_t i = 0; i < z.rows(); ++i) {
      for (std::size_t k = 0; k < z.cols(); ++k) {
        const double t = z(i, k) - (static_cast<std::size_t>(d.labels[i]) == k ? 1.0 : 0.0);
        loss += t * t;
      }
    }
    loss /= 2.0 * s;
  }
  return {std::move(hb), std::move(z), loss};
}

}  // namespace

Problem mlp_problem(const MlpSpec& spec, std::uint64_t seed) {
  constexpr std::size_t max_width = 64;
  constexpr std::size_t max_samples = 2048;
  if (spec.inputs == 0 || spec.hidden == 0 || spec.outputs == 0 || spec.inputs > max_width ||
      spec.hidden > max_width || spec.outputs > max_width) {
    throw ConfigInvalid("mlp_problem: widths must lie in [1, 64]");
  }
  if (spec.samples == 0 || spec.samples > max_samples) {
    throw ConfigInvalid("mlp_problem: samples must lie in [1, 2048]");
  }
  if (spec.loss == MlpLoss::CrossEntropy && spec.outputs < 2) {
    throw ConfigInvalid("mlp_problem: cross-entropy needs at least 2 outputs");
  }

  Dataset blobs = make_blobs(spec.samples, spec.inputs, spec.outputs, spec.separation, seed);
  auto data = std::make_shared<const MlpData>(
      MlpData{with_bias_column(blobs.x), blobs.labels, spec.hidden, spec.outputs, spec.loss});

  Problem p;
  p.name = "mlp";
  p.blocks = {{"layer1", spec.hidden, spec.inputs + 1}, {"layer2", spec.outputs, spec.hidden + 1}};
  p.f_star = 0.0;
  p.value = [data](const Params& w) { return forward(*data, w).loss; };
  p.gradient = [data](const Params& w) {
    const MlpData& d = *data;
    const double s = static_cast<double>(d.xb.rows());
    Forward f = forward(d, w);
    // Both losses give dL/dz = (prediction − one_hot) / s.
    Matrix dz = std::move(f.z);
    for (std::size_t i = 0; i < dz.rows(); ++i) dz(i, static_cast<std::size_t>(d.labels[i])) -= 1.0;
    dz *= 1.0 / s;
    Matrix g2 = matmul_tn(dz, f.hb);     // outputs × (hidden+1)
    Matrix dhb = matmul(dz, w[1]);       // samples × (hidden+1)
    Matrix dpre(dhb.rows(), d.hidden);
    for (std::size_t i = 0; i < dpre.rows(); ++i) {
      for (std::size_t k = 0; k < d.hidden; ++k) {
        const double h = f.hb(i, k);
        dpre(i, k) = dhb(i, k) * (1.0 - h * h);
      }
    }
    Matrix g1 = matmul_tn(dpre, d.xb);   // hidden × (inputs+1)
    return Params{std::move(g1), std::move(g2)};
  };
  const double s1 = 1.0 / std::sqrt(static_cast<double>(spec.inputs + 1));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden + 1));
  p.init = [blocks = p.blocks, s1, s2](std::uint64_t init_seed) {
    return random_init(blocks, init_seed, {s1, s2});
  };
  return p;
}

Problem rosenbrock_matrix(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0 || m * n < 2) {
    throw ConfigInvalid("rosenbrock_matrix: needs at least two entries");
  }
  Problem p;
  p.name = "rosenbrock";
  p.blocks = {{"W", m, n}};
  p.f_star = 0.0;
  p.value = [](const Params& w) {
    const auto x = w.front().data();
    double f = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double t = x[k + 1] - x[k] * x[k];
      const double u = 1.0 - x[k];
      f += 100.0 * t * t + u * u;
    }
    return f;
  };
  p.gradient = [](const Params& w) {
    const Matrix& wm = w.front();
    const auto x = wm.data();
    Matrix g(wm.rows(), wm.cols());
    auto gd = g.data();
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double t = x[k + 1] - x[k] * x[k];
      gd[k] += -400.0 * x[k] * t - 2.0 * (1.0 - x[k]);
      gd[k + 1] += 200.0 * t;
    }
    return Params{std::move(g)};
  };
  p.init = [blocks = p.blocks](std::uint64_t seed) { return random_init(blocks, seed, {0.5}); };
  return p;
}

}  // namespace regopt
