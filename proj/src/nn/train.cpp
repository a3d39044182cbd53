#include "fjs/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fjs/rng.hpp"

namespace fjs::nn {

AdamOptimizer::AdamOptimizer(std::size_t param_count, const TrainConfig& config)
    : lr_(config.learning_rate),
      beta1_(config.beta1),
      beta2_(config.beta2),
      eps_(config.epsilon),
      m_(param_count, 0.0),
      v_(param_count, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("optimizer state does not match parameter count");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

TrainReport train_bc(HgatParams& params, const std::vector<env::TrainingSample>& samples,
                     const TrainConfig& config, const ProgressFn& progress) {
  if (samples.empty()) throw std::invalid_argument("no training samples");
  if (config.epochs < 1 || config.batch_size < 1)
    throw std::invalid_argument("epochs and batch size must be positive");

  AdamOptimizer opt(params.size(), config);
  Rng rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(
            rng.next_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
      }
    }

    double epoch_loss = 0.0;
    std::size_t cursor = 0;
    while (cursor < order.size()) {
      const std::size_t end =
          std::min(order.size(), cursor + static_cast<std::size_t>(config.batch_size));
      std::vector<env::TrainingSample> batch;
      batch.reserve(end - cursor);
      for (std::size_t k = cursor; k < end; ++k) batch.push_back(samples[order[k]]);

      const LossGrad lg = policy_loss_grad(params, batch);
      if (!std::isfinite(lg.loss)) throw std::runtime_error("training loss diverged");
      opt.step(params.values(), lg.grad);

      epoch_loss += lg.loss * static_cast<double>(batch.size());
      cursor = end;
    }
    epoch_loss /= static_cast<double>(samples.size());
    report.epoch_losses.push_back(epoch_loss);
    if (progress) progress(epoch, epoch_loss);
  }
  return report;
}

}  // namespace fjs::nn
