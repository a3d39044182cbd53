#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace fjs {

struct GbrConfig {
  int n_trees = 100;
  int max_depth = 3;
  int min_leaf = 2;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

struct GbrNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct GbrTree {
  std::vector<GbrNode> nodes;  // node 0 is the root
};

// Least-squares gradient boosting over axis-aligned regression trees.
// Split selection is a deterministic greedy scan, so a fit is reproducible
// from the data alone.
class GbrModel {
 public:
  static GbrModel fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                      const GbrConfig& config);

  // base + rate * sum of leaf values over all trees
  double predict(const std::vector<double>& x) const;
  // same, restricted to the first tree_count trees
  double predict_with(const std::vector<double>& x, int tree_count) const;

  int tree_count() const { return static_cast<int>(trees_.size()); }
  int feature_count() const { return feature_count_; }
  double base() const { return base_; }
  const GbrConfig& config() const { return config_; }

  nlohmann::json to_json() const;
  static GbrModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static GbrModel load(const std::string& path);

 private:
  GbrConfig config_;
  int feature_count_ = 0;
  double base_ = 0.0;
  std::vector<GbrTree> trees_;
};

}  // namespace fjs
