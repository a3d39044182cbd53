#include "fjs/gbr.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "fjs/hash.hpp"

namespace fjs {

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double subset_mean(const std::vector<double>& r, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) s += r[i];
  return s / static_cast<double>(idx.size());
}

// Best SSE-reducing split over the given rows. Features are scanned in
// ascending order and candidate thresholds in ascending value order, with a
// strict improvement rule, so ties resolve to the first candidate.
SplitChoice best_split(const std::vector<std::vector<double>>& x, const std::vector<double>& r,
                       const std::vector<int>& idx, int min_leaf) {
  SplitChoice best;
  const int n = static_cast<int>(idx.size());
  if (n < 2 * min_leaf) return best;

  double total_sum = 0.0;
  for (int i : idx) total_sum += r[i];
  const double total_mean = total_sum / n;
  double total_sse = 0.0;
  for (int i : idx) total_sse += (r[i] - total_mean) * (r[i] - total_mean);

  const int n_features = static_cast<int>(x[idx[0]].size());
  std::vector<int> order(idx);
  for (int f = 0; f < n_features; ++f) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
      return a < b;
    });
    double left_sum = 0.0;
    for (int k = 0; k < n - 1; ++k) {
      left_sum += r[order[k]];
      const double lo = x[order[k]][f];
      const double hi = x[order[k + 1]][f];
      if (lo == hi) continue;
      const int nl = k + 1;
      const int nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total_sum - left_sum;
      // SSE reduction = n_l*mean_l^2 + n_r*mean_r^2 - n*mean^2 (constant
      // sum-of-squares term cancels)
      const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr -
                          total_sum * total_sum / n;
      if (gain > best.gain + 1e-12) {
        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (lo + hi);
        best.gain = gain;
      }
    }
  }
  if (best.found && total_sse <= 1e-12) best.found = false;
  return best;
}

int build_node(GbrTree& tree, const std::vector<std::vector<double>>& x,
               const std::vector<double>& r, const std::vector<int>& idx, int depth,
               const GbrConfig& cfg) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  SplitChoice split;
  if (depth < cfg.max_depth) split = best_split(x, r, idx, cfg.min_leaf);
  if (!split.found) {
    tree.nodes[id].value = subset_mean(r, idx);
    return id;
  }

  std::vector<int> left_idx, right_idx;
  for (int i : idx)
    (x[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);

  tree.nodes[id].feature = split.feature;
  tree.nodes[id].threshold = split.threshold;
  const int left = build_node(tree, x, r, left_idx, depth + 1, cfg);
  const int right = build_node(tree, x, r, right_idx, depth + 1, cfg);
  tree.nodes[id].left = left;
  tree.nodes[id].right = right;
  return id;
}

double tree_value(const GbrTree& tree, const std::vector<double>& x) {
  int node = 0;
  while (tree.nodes[node].feature >= 0) {
    const GbrNode& nd = tree.nodes[node];
    node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[node].value;
}

}  // namespace

GbrModel GbrModel::fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                       const GbrConfig& config) {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument("bad training data shape");
  if (config.n_trees < 0 || config.max_depth < 0 || config.min_leaf < 1 ||
      config.learning_rate <= 0.0)
    throw std::invalid_argument("bad boosting config");
  const std::size_t width = x[0].size();
  if (width == 0) throw std::invalid_argument("samples need at least one feature");
  for (const auto& row : x)
    if (row.size() != width) throw std::invalid_argument("ragged feature rows");

  GbrModel model;
  model.config_ = config;
  model.feature_count_ = static_cast<int>(width);
  model.base_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  std::vector<double> residual(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - model.base_;

  std::vector<int> all(y.size());
  std::iota(all.begin(), all.end(), 0);

  for (int t = 0; t < config.n_trees; ++t) {
    GbrTree tree;
    build_node(tree, x, residual, all, 0, config);
    for (std::size_t i = 0; i < y.size(); ++i)
      residual[i] -= config.learning_rate * tree_value(tree, x[i]);
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double GbrModel::predict(const std::vector<double>& x) const {
  return predict_with(x, tree_count());
}

double GbrModel::predict_with(const std::vector<double>& x, int tree_count) const {
  if (static_cast<int>(x.size()) != feature_count_)
    throw std::invalid_argument("feature count mismatch");
  if (tree_count < 0 || tree_count > this->tree_count())
    throw std::invalid_argument("tree count out of range");
  double out = base_;
  for (int t = 0; t < tree_count; ++t)
    out += config_.learning_rate * tree_value(trees_[t], x);
  return out;
}

nlohmann::json GbrModel::to_json() const {
  nlohmann::json j;
  j["kind"] = "gbr";
  j["config"] = {{"n_trees", config_.n_trees},
                 {"max_depth", config_.max_depth},
                 {"min_leaf", config_.min_leaf},
                 {"learning_rate", config_.learning_rate},
                 {"seed", config_.seed}};
  j["feature_count"] = feature_count_;
  j["base"] = base_;
  nlohmann::json trees = nlohmann::json::array();
  for (const GbrTree& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const GbrNode& nd : tree.nodes)
      nodes.push_back({{"f", nd.feature},
                       {"t", nd.threshold},
                       {"l", nd.left},
                       {"r", nd.right},
                       {"v", nd.value}});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  j["checksum"] = to_hex(fnv1a64(j.dump()));
  return j;
}

GbrModel GbrModel::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("kind", "") != "gbr")
    throw std::runtime_error("not a boosted-trees model");
  if (j.contains("checksum")) {
    nlohmann::json body = j;
    body.erase("checksum");
    if (to_hex(fnv1a64(body.dump())) != j["checksum"].get<std::string>())
      throw std::runtime_error("model checksum mismatch");
  }
  GbrModel model;
  const auto& c = j.at("config");
  model.config_.n_trees = c.at("n_trees").get<int>();
  model.config_.max_depth = c.at("max_depth").get<int>();
  model.config_.min_leaf = c.at("min_leaf").get<int>();
  model.config_.learning_rate = c.at("learning_rate").get<double>();
  model.config_.seed = c.at("seed").get<std::uint64_t>();
  model.feature_count_ = j.at("feature_count").get<int>();
  model.base_ = j.at("base").get<double>();
  for (const auto& tj : j.at("trees")) {
    GbrTree tree;
    for (const auto& nj : tj) {
      GbrNode nd;
      nd.feature = nj.at("f").get<int>();
      nd.threshold = nj.at("t").get<double>();
      nd.left = nj.at("l").get<int>();
      nd.right = nj.at("r").get<int>();
      nd.value = nj.at("v").get<double>();
      tree.nodes.push_back(nd);
    }
    if (tree.nodes.empty()) throw std::runtime_error("empty tree in model file");
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

void GbrModel::save(const std::string& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + path);
  f << to_json().dump(2) << '\n';
  if (!f) throw std::runtime_error("failed writing model file: " + path);
}

GbrModel GbrModel::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  f >> j;
  return from_json(j);
}

}  // namespace fjs
