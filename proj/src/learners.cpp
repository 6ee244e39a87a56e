/*
 * Copyright 2026 The evalmodel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "evalmodel/learners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "evalmodel/errors.hpp"
#include "evalmodel/random.hpp"

namespace evalmodel {
namespace {

using nlohmann::json;

void check_width(std::span<const double> row, std::size_t width) {
  if (row.size() != width) {
    throw InputError("row width " + std::to_string(row.size()) + " does not match model width " +
                     std::to_string(width));
  }
}

void check_training_data(const Matrix& rows, std::span<const double> targets) {
  if (rows.rows() != targets.size()) {
    throw InputError("feature rows (" + std::to_string(rows.rows()) + ") and targets (" +
                     std::to_string(targets.size()) + ") disagree");
  }
  if (rows.rows() < 2) throw InputError("need at least 2 training rows");
  if (rows.cols() == 0) throw InputError("need at least one feature column");
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    if (!std::isfinite(targets[i])) {
      throw InputError("non-finite target at row " + std::to_string(i));
    }
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      if (!std::isfinite(rows(i, c))) {
        throw InputError("non-finite feature at row " + std::to_string(i) + ", column " +
                         std::to_string(c));
      }
    }
  }
}

// Mean with one refinement pass, so constant inputs give the constant back.
double refined_mean(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  double corr = 0.0;
  for (double v : values) corr += v - m;
  return m + corr / static_cast<double>(values.size());
}

bool is_constant(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; });
}

// ---------------------------------------------------------------- linear

class LinearRegressor final : public Regressor {
 public:
  LinearRegressor(std::vector<double> coef, double intercept)
      : coef_(std::move(coef)), intercept_(intercept) {}

  double predict(std::span<const double> row) const override {
    check_width(row, coef_.size());
    double s = intercept_;
    for (std::size_t i = 0; i < coef_.size(); ++i) s += coef_[i] * row[i];
    return s;
  }
  std::size_t input_width() const override { return coef_.size(); }
  LearnerKind kind() const override { return LearnerKind::kLinear; }
  json to_json() const override {
    return {{"kind", "linear"}, {"coef", coef_}, {"intercept", intercept_}};
  }

  const std::vector<double>& coef() const { return coef_; }
  double intercept() const { return intercept_; }

 private:
  std::vector<double> coef_;
  double intercept_;
};

std::unique_ptr<Regressor> fit_linear(const Matrix& rows, std::span<const double> targets,
                                      const BaseLearnerConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(rows.rows());
  const auto p = static_cast<Eigen::Index>(rows.cols());
  Eigen::MatrixXd x(n, p + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < p; ++c) x(i, c) = rows(i, c);
    x(i, p) = 1.0;
    y(i) = targets[i];
  }
  Eigen::MatrixXd a = x.transpose() * x;
  const Eigen::VectorXd b = x.transpose() * y;
  if (cfg.ridge_strength == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < p + 1) {
      throw NumericError("singular normal equations (rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(p + 1) + "); set ridge_strength > 0");
    }
  }
  for (Eigen::Index c = 0; c < p; ++c) a(c, c) += cfg.ridge_strength;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericError("normal-equation solve failed");
  const Eigen::VectorXd w = ldlt.solve(b);
  if (!w.allFinite()) {
    throw NumericError("normal-equation solve produced non-finite coefficients; raise ridge");
  }
  std::vector<double> coef(w.data(), w.data() + p);
  return std::make_unique<LinearRegressor>(std::move(coef), w(p));
}

// ---------------------------------------------------------------- mlp

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  double apply(std::size_t c, double v) const { return (v - mean[c]) / scale[c]; }
};

class MlpRegressor final : public Regressor {
 public:
  // dims = [input, hidden..., 1]; weights layer-major, row-major (out, in).
  MlpRegressor(std::vector<std::size_t> dims, std::vector<std::vector<double>> weights,
               std::vector<std::vector<double>> biases, Standardizer x_std, double y_mean,
               double y_scale)
      : dims_(std::move(dims)),
        weights_(std::move(weights)),
        biases_(std::move(biases)),
        x_std_(std::move(x_std)),
        y_mean_(y_mean),
        y_scale_(y_scale) {}

  double predict(std::span<const double> row) const override {
    check_width(row, dims_.front());
    std::vector<double> a(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) a[c] = x_std_.apply(c, row[c]);
    std::vector<double> z;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      const std::size_t in = dims_[l];
      const std::size_t out = dims_[l + 1];
      z.assign(out, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        double s = biases_[l][o];
        const double* w = weights_[l].data() + o * in;
        for (std::size_t i = 0; i < in; ++i) s += w[i] * a[i];
        const bool hidden = l + 2 < dims_.size();
        z[o] = hidden ? std::max(0.0, s) : s;
      }
      a.swap(z);
    }
    return a[0] * y_scale_ + y_mean_;
  }
  std::size_t input_width() const override { return dims_.front(); }
  LearnerKind kind() const override { return LearnerKind::kMlp; }
  json to_json() const override {
    return {{"kind", "mlp"},          {"dims", dims_},          {"weights", weights_},
            {"biases", biases_},      {"x_mean", x_std_.mean},  {"x_scale", x_std_.scale},
            {"y_mean", y_mean_},      {"y_scale", y_scale_}};
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
  Standardizer x_std_;
  double y_mean_;
  double y_scale_;
};

struct Adam {
  std::vector<double> m;
  std::vector<double> v;
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad, double lr,
            std::size_t t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

std::unique_ptr<Regressor> fit_mlp(const Matrix& rows, std::span<const double> targets,
                                   const BaseLearnerConfig& cfg) {
  const std::size_t n = rows.rows();
  const std::size_t p = rows.cols();

  Standardizer x_std{std::vector<double>(p, 0.0), std::vector<double>(p, 1.0)};
  for (std::size_t c = 0; c < p; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += rows(i, c);
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (rows(i, c) - m) * (rows(i, c) - m);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    x_std.mean[c] = m;
    x_std.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  const double y_mean = refined_mean(targets);
  double yss = 0.0;
  for (double t : targets) yss += (t - y_mean) * (t - y_mean);
  const double y_sd = std::sqrt(yss / static_cast<double>(n));
  const double y_scale = y_sd > 1e-12 ? y_sd : 1.0;

  Matrix xs(n, p);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) xs(i, c) = x_std.apply(c, rows(i, c));
    ys[i] = (targets[i] - y_mean) / y_scale;
  }

  std::vector<std::size_t> dims{p};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  const std::size_t layers = dims.size() - 1;

  RandomStream init(derive_seed(cfg.seed, 0x4d4c50));
  std::vector<std::vector<double>> w(layers), b(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const double sd = std::sqrt((l + 1 < layers ? 2.0 : 1.0) / static_cast<double>(dims[l]));
    w[l].resize(dims[l] * dims[l + 1]);
    for (double& v : w[l]) v = init.normal(0.0, sd);
    b[l].assign(dims[l + 1], 0.0);
  }
  std::vector<Adam> adam_w, adam_b;
  std::vector<std::vector<double>> gw(layers), gb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    adam_w.emplace_back(w[l].size());
    adam_b.emplace_back(b[l].size());
    gw[l].resize(w[l].size());
    gb[l].resize(b[l].size());
  }

  // Per-layer activations and deltas for one sample.
  std::vector<std::vector<double>> act(layers + 1), delta(layers + 1);
  for (std::size_t l = 0; l <= layers; ++l) {
    act[l].resize(dims[l]);
    delta[l].resize(dims[l]);
  }

  RandomStream order_rng(derive_seed(cfg.seed, 0x4f5244));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      for (std::size_t l = 0; l < layers; ++l) {
        std::fill(gw[l].begin(), gw[l].end(), 0.0);
        std::fill(gb[l].begin(), gb[l].end(), 0.0);
      }
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        std::copy(xs.row(i).begin(), xs.row(i).end(), act[0].begin());
        for (std::size_t l = 0; l < layers; ++l) {
          const std::size_t in = dims[l];
          for (std::size_t o = 0; o < dims[l + 1]; ++o) {
            double s = b[l][o];
            const double* wr = w[l].data() + o * in;
            for (std::size_t j = 0; j < in; ++j) s += wr[j] * act[l][j];
            act[l + 1][o] = l + 1 < layers ? std::max(0.0, s) : s;
          }
        }
        delta[layers][0] = act[layers][0] - ys[i];
        for (std::size_t l = layers; l-- > 0;) {
          const std::size_t in = dims[l];
          for (std::size_t o = 0; o < dims[l + 1]; ++o) {
            const double d = delta[l + 1][o];
            if (d == 0.0) continue;
            gb[l][o] += d;
            double* g = gw[l].data() + o * in;
            for (std::size_t j = 0; j < in; ++j) g[j] += d * act[l][j];
          }
          if (l == 0) break;
          for (std::size_t j = 0; j < in; ++j) {
            if (act[l][j] <= 0.0) {
              delta[l][j] = 0.0;
              continue;
            }
            double s = 0.0;
            for (std::size_t o = 0; o < dims[l + 1]; ++o) s += w[l][o * in + j] * delta[l + 1][o];
            delta[l][j] = s;
          }
        }
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      ++t;
      for (std::size_t l = 0; l < layers; ++l) {
        for (double& g : gw[l]) g *= inv;
        for (double& g : gb[l]) g *= inv;
        adam_w[l].step(w[l], gw[l], cfg.learning_rate, t);
        adam_b[l].step(b[l], gb[l], cfg.learning_rate, t);
      }
    }
  }
  return std::make_unique<MlpRegressor>(std::move(dims), std::move(w), std::move(b),
                                        std::move(x_std), y_mean, y_scale);
}

// ---------------------------------------------------------------- gbt

struct TreeNode {
  // Leaf when feature < 0.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

using Tree = std::vector<TreeNode>;

double tree_predict(const Tree& tree, std::span<const double> row) {
  int node = 0;
  while (tree[node].feature >= 0) {
    const TreeNode& t = tree[node];
    node = row[t.feature] <= t.threshold ? t.left : t.right;
  }
  return tree[node].value;
}

json tree_to_json(const Tree& tree, int node) {
  const TreeNode& t = tree[node];
  if (t.feature < 0) return {{"leaf", t.value}};
  return {{"feature", t.feature},
          {"threshold", t.threshold},
          {"left", tree_to_json(tree, t.left)},
          {"right", tree_to_json(tree, t.right)}};
}

int tree_from_json(const json& j, Tree& tree) {
  const int id = static_cast<int>(tree.size());
  tree.emplace_back();
  if (j.contains("leaf")) {
    tree[id].value = j.at("leaf").get<double>();
    return id;
  }
  tree[id].feature = j.at("feature").get<int>();
  tree[id].threshold = j.at("threshold").get<double>();
  const int l = tree_from_json(j.at("left"), tree);
  const int r = tree_from_json(j.at("right"), tree);
  tree[id].left = l;
  tree[id].right = r;
  return id;
}

class GbtRegressor final : public Regressor {
 public:
  // init_coef is empty or holds one coefficient per input column.
  GbtRegressor(std::size_t width, double base, std::vector<double> init_coef,
               std::vector<Tree> trees)
      : width_(width), base_(base), init_coef_(std::move(init_coef)), trees_(std::move(trees)) {}

  double predict(std::span<const double> row) const override {
    check_width(row, width_);
    double s = base_;
    for (std::size_t i = 0; i < init_coef_.size(); ++i) s += init_coef_[i] * row[i];
    for (const Tree& t : trees_) s += tree_predict(t, row);
    return s;
  }
  std::size_t input_width() const override { return width_; }
  LearnerKind kind() const override { return LearnerKind::kGradientBoostedTrees; }
  json to_json() const override {
    json trees = json::array();
    for (const Tree& t : trees_) trees.push_back(tree_to_json(t, 0));
    return {{"kind", "gbt"},
            {"width", width_},
            {"base", base_},
            {"init_coef", init_coef_},
            {"trees", trees}};
  }

 private:
  std::size_t width_;
  double base_;
  std::vector<double> init_coef_;
  std::vector<Tree> trees_;
};

// Per-feature split candidates: midpoints of distinct values, thinned to
// quantiles when there are more than max_bins - 1 of them.
std::vector<std::vector<double>> bin_thresholds(const Matrix& rows, std::size_t max_bins) {
  std::vector<std::vector<double>> out(rows.cols());
  std::vector<double> col;
  for (std::size_t c = 0; c < rows.cols(); ++c) {
    col.resize(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) col[i] = rows(i, c);
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < col.size(); ++i) mids.push_back(0.5 * (col[i] + col[i + 1]));
    if (mids.size() >= max_bins) {
      std::vector<double> thin;
      const std::size_t keep = max_bins - 1;
      for (std::size_t q = 1; q <= keep; ++q) {
        thin.push_back(mids[(q * mids.size()) / (keep + 1)]);
      }
      thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
      mids.swap(thin);
    }
    out[c] = std::move(mids);
  }
  return out;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  std::size_t bin = 0;
};

std::unique_ptr<Regressor> fit_gbt(const Matrix& rows, std::span<const double> targets,
                                   const BaseLearnerConfig& cfg) {
  const std::size_t n = rows.rows();
  const std::size_t p = rows.cols();
  const auto thresholds = bin_thresholds(rows, cfg.max_bins);

  // bin(x) = number of thresholds strictly below x, so x <= t[b] <=> bin <= b.
  std::vector<std::uint8_t> bins(n * p);
  std::vector<std::size_t> n_bins(p);
  for (std::size_t c = 0; c < p; ++c) {
    const auto& t = thresholds[c];
    n_bins[c] = t.size() + 1;
    for (std::size_t i = 0; i < n; ++i) {
      bins[i * p + c] = static_cast<std::uint8_t>(
          std::lower_bound(t.begin(), t.end(), rows(i, c)) - t.begin());
    }
  }

  double base = 0.0;
  std::vector<double> init_coef;
  std::vector<double> pred(n);
  if (cfg.linear_init && !is_constant(targets)) {
    init_coef = linear_coefficients(*fit_linear(rows, targets, cfg));
    base = init_coef.back();
    init_coef.pop_back();
    for (std::size_t i = 0; i < n; ++i) {
      double s = base;
      for (std::size_t c = 0; c < p; ++c) s += init_coef[c] * rows(i, c);
      pred[i] = s;
    }
  } else {
    base = refined_mean(targets);
    std::fill(pred.begin(), pred.end(), base);
  }
  std::vector<double> resid(n);
  std::vector<Tree> trees;
  trees.reserve(cfg.trees);
  RandomStream rng(derive_seed(cfg.seed, 0x474254));
  const std::size_t min_leaf = std::max<std::size_t>(1, cfg.min_samples_leaf);

  std::vector<double> hist_g;
  std::vector<std::size_t> hist_n;
  std::vector<std::size_t> offset(p + 1, 0);
  for (std::size_t c = 0; c < p; ++c) offset[c + 1] = offset[c] + n_bins[c];
  hist_g.resize(offset[p]);
  hist_n.resize(offset[p]);

  for (std::size_t t = 0; t < cfg.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = targets[i] - pred[i];
    std::vector<std::size_t> sample;
    if (cfg.subsample < 1.0) {
      const auto m = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n))));
      sample = rng.sample_without_replacement(n, std::min(m, n));
      std::sort(sample.begin(), sample.end());
    } else {
      sample.resize(n);
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }

    Tree tree;
    struct Pending {
      int node;
      std::vector<std::size_t> idx;
      std::size_t depth;
    };
    std::vector<Pending> frontier;
    tree.emplace_back();
    frontier.push_back({0, std::move(sample), 0});
    while (!frontier.empty()) {
      Pending cur = std::move(frontier.back());
      frontier.pop_back();
      double g_total = 0.0;
      for (std::size_t i : cur.idx) g_total += resid[i];
      const double count = static_cast<double>(cur.idx.size());
      tree[cur.node].value = cfg.shrinkage * g_total / count;
      if (cur.depth >= cfg.depth || cur.idx.size() < 2 * min_leaf) continue;

      std::fill(hist_g.begin(), hist_g.end(), 0.0);
      std::fill(hist_n.begin(), hist_n.end(), 0);
      for (std::size_t i : cur.idx) {
        const std::uint8_t* br = bins.data() + i * p;
        const double g = resid[i];
        for (std::size_t c = 0; c < p; ++c) {
          hist_g[offset[c] + br[c]] += g;
          hist_n[offset[c] + br[c]] += 1;
        }
      }
      const double parent = g_total * g_total / count;
      SplitCandidate best;
      for (std::size_t c = 0; c < p; ++c) {
        double gl = 0.0;
        std::size_t nl = 0;
        for (std::size_t b = 0; b + 1 < n_bins[c]; ++b) {
          gl += hist_g[offset[c] + b];
          nl += hist_n[offset[c] + b];
          const std::size_t nr = cur.idx.size() - nl;
          if (nl < min_leaf) continue;
          if (nr < min_leaf) break;
          const double gr = g_total - gl;
          const double gain = gl * gl / static_cast<double>(nl) +
                              gr * gr / static_cast<double>(nr) - parent;
          if (gain > best.gain + 1e-12) best = {gain, static_cast<int>(c), b};
        }
      }
      if (best.feature < 0) continue;

      const auto f = static_cast<std::size_t>(best.feature);
      std::vector<std::size_t> left, right;
      for (std::size_t i : cur.idx) {
        (bins[i * p + f] <= best.bin ? left : right).push_back(i);
      }
      const int l = static_cast<int>(tree.size());
      tree.emplace_back();
      const int r = static_cast<int>(tree.size());
      tree.emplace_back();
      TreeNode& node = tree[cur.node];
      node.feature = best.feature;
      node.threshold = thresholds[f][best.bin];
      node.left = l;
      node.right = r;
      frontier.push_back({r, std::move(right), cur.depth + 1});
      frontier.push_back({l, std::move(left), cur.depth + 1});
    }
    for (std::size_t i = 0; i < n; ++i) pred[i] += tree_predict(tree, rows.row(i));
    trees.push_back(std::move(tree));
  }
  return std::make_unique<GbtRegressor>(p, base, std::move(init_coef), std::move(trees));
}

}  // namespace

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kLinear:
      return "linear";
    case LearnerKind::kMlp:
      return "mlp";
    case LearnerKind::kGradientBoostedTrees:
      return "gbt";
  }
  return "?";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "linear") return LearnerKind::kLinear;
  if (s == "mlp") return LearnerKind::kMlp;
  if (s == "gbt" || s == "gradient_boosted_trees") return LearnerKind::kGradientBoostedTrees;
  throw ConfigError("unknown learner kind '" + name + "'");
}

void BaseLearnerConfig::validate() const {
  if (!(ridge_strength >= 0.0) || !std::isfinite(ridge_strength)) {
    throw ConfigError("ridge_strength must be finite and >= 0");
  }
  if (kind == LearnerKind::kMlp) {
    if (hidden.empty() || hidden.size() > 2) throw ConfigError("mlp needs 1 or 2 hidden layers");
    for (auto h : hidden) {
      if (h == 0) throw ConfigError("mlp hidden widths must be positive");
    }
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (epochs == 0 || batch_size == 0) throw ConfigError("epochs and batch_size must be positive");
  }
  if (kind == LearnerKind::kGradientBoostedTrees) {
    if (trees == 0 || depth == 0) throw ConfigError("trees and depth must be positive");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0)) throw ConfigError("shrinkage must lie in (0, 1]");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("subsample must lie in (0, 1]");
    if (max_bins < 2 || max_bins > 256) throw ConfigError("max_bins must lie in [2, 256]");
    if (min_samples_leaf == 0) throw ConfigError("min_samples_leaf must be positive");
  }
}

std::string BaseLearnerConfig::display_name() const {
  switch (kind) {
    case LearnerKind::kLinear:
      return "Linear";
    case LearnerKind::kMlp:
      return "MLP";
    case LearnerKind::kGradientBoostedTrees:
      return "GBT";
  }
  return "?";
}

nlohmann::json to_json(const BaseLearnerConfig& cfg) {
  return {{"kind", to_string(cfg.kind)},
          {"ridge_strength", cfg.ridge_strength},
          {"hidden", cfg.hidden},
          {"learning_rate", cfg.learning_rate},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"trees", cfg.trees},
          {"depth", cfg.depth},
          {"shrinkage", cfg.shrinkage},
          {"subsample", cfg.subsample},
          {"min_samples_leaf", cfg.min_samples_leaf},
          {"max_bins", cfg.max_bins},
          {"linear_init", cfg.linear_init},
          {"seed", cfg.seed}};
}

BaseLearnerConfig learner_config_from_json(const nlohmann::json& j) {
  BaseLearnerConfig cfg;
  try {
    if (j.contains("kind")) cfg.kind = learner_kind_from_string(j.at("kind").get<std::string>());
    cfg.ridge_strength = j.value("ridge_strength", cfg.ridge_strength);
    cfg.hidden = j.value("hidden", cfg.hidden);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.trees = j.value("trees", cfg.trees);
    cfg.depth = j.value("depth", cfg.depth);
    cfg.shrinkage = j.value("shrinkage", cfg.shrinkage);
    cfg.subsample = j.value("subsample", cfg.subsample);
    cfg.min_samples_leaf = j.value("min_samples_leaf", cfg.min_samples_leaf);
    cfg.max_bins = j.value("max_bins", cfg.max_bins);
    cfg.linear_init = j.value("linear_init", cfg.linear_init);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("learner config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::unique_ptr<Regressor> fit_base(const Matrix& rows, std::span<const double> targets,
                                    const BaseLearnerConfig& cfg) {
  cfg.validate();
  check_training_data(rows, targets);
  switch (cfg.kind) {
    case LearnerKind::kLinear:
      return fit_linear(rows, targets, cfg);
    case LearnerKind::kMlp:
      return fit_mlp(rows, targets, cfg);
    case LearnerKind::kGradientBoostedTrees:
      return fit_gbt(rows, targets, cfg);
  }
  throw ConfigError("unknown learner kind");
}

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
      return std::make_unique<LinearRegressor>(j.at("coef").get<std::vector<double>>(),
                                               j.at("intercept").get<double>());
    }
    if (kind == "mlp") {
      return std::make_unique<MlpRegressor>(
          j.at("dims").get<std::vector<std::size_t>>(),
          j.at("weights").get<std::vector<std::vector<double>>>(),
          j.at("biases").get<std::vector<std::vector<double>>>(),
          Standardizer{j.at("x_mean").get<std::vector<double>>(),
                       j.at("x_scale").get<std::vector<double>>()},
          j.at("y_mean").get<double>(), j.at("y_scale").get<double>());
    }
    if (kind == "gbt") {
      std::vector<Tree> trees;
      for (const auto& tj : j.at("trees")) {
        Tree t;
        tree_from_json(tj, t);
        trees.push_back(std::move(t));
      }
      return std::make_unique<GbtRegressor>(j.at("width").get<std::size_t>(),
                                            j.at("base").get<double>(),
                                            j.at("init_coef").get<std::vector<double>>(),
                                            std::move(trees));
    }
    throw InputError("unknown regressor kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed regressor document: ") + e.what());
  }
}

std::vector<double> linear_coefficients(const Regressor& model) {
  const auto* lin = dynamic_cast<const LinearRegressor*>(&model);
  if (lin == nullptr) throw InputError("not a linear model");
  std::vector<double> out = lin->coef();
  out.push_back(lin->intercept());
  return out;
}

}  // namespace evalmodel
