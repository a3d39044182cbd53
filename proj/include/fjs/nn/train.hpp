#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fjs/env.hpp"
#include "fjs/nn/hgat.hpp"

namespace fjs::nn {

struct TrainConfig {
  int epochs = 25;
  int batch_size = 64;
  double learning_rate = 0.0002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool shuffle = true;
};

struct TrainReport {
  // mean per-sample loss of each epoch, in order
  std::vector<double> epoch_losses;
};

// Adam state kept across steps so training can be driven batch by batch.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t param_count, const TrainConfig& config);

  void step(std::vector<double>& params, const std::vector<double>& grad);
  std::int64_t steps_taken() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

using ProgressFn = std::function<void(int epoch, double mean_loss)>;

// Behavioral cloning: minimizes the mean cross-entropy between the policy
// distribution and the recorded one-hot action of each sample.
TrainReport train_bc(HgatParams& params, const std::vector<env::TrainingSample>& samples,
                     const TrainConfig& config, const ProgressFn& progress = nullptr);

}  // namespace fjs::nn
