#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fjs/env.hpp"
#include "fjs/nn/tape.hpp"

namespace fjs::nn {

struct HgatDims {
  int op_feat = 5;
  int job_feat = 4;
  int machine_feat = 3;
  int om_edge_feat = 4;
  int mj_edge_feat = 4;
  int hidden = 128;  // per-head width; heads concatenate
  int layers = 3;
  int heads = 1;
  bool operator==(const HgatDims&) const = default;

  int embedding_dim() const { return hidden * heads; }
};

struct ParamInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  bool bias = false;
};

// Per-relation attention and message weights. Values of -1 mean the slot is
// unused (relations without edge features).
struct RelSlots {
  int attn_dst = -1, attn_src = -1, attn_edge = -1;
  int msg_src = -1, msg_edge = -1;
};

struct ClassSlots {
  int self = -1;
  RelSlots rel[3];
};

struct MlpSlots {
  int w1 = -1, b1 = -1, w2 = -1, b2 = -1, w3 = -1, b3 = -1;
};

// Destination-centric relation order, fixed:
//   machines aggregate from { other machines, operations (om edges), jobs (mj edges) }
//   operations aggregate from { immediate predecessor, machines (om edges), owning job }
//   jobs aggregate from { other jobs, member pending operations, machines (mj edges) }
class HgatParams {
 public:
  HgatParams() = default;
  explicit HgatParams(const HgatDims& dims);

  const HgatDims& dims() const { return dims_; }
  const std::vector<ParamInfo>& registry() const { return registry_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  const ClassSlots& machine_slots(int layer, int head) const { return slots_[idx(layer, head)].mach; }
  const ClassSlots& op_slots(int layer, int head) const { return slots_[idx(layer, head)].op; }
  const ClassSlots& job_slots(int layer, int head) const { return slots_[idx(layer, head)].job; }
  const MlpSlots& mlp_slots() const { return mlp_; }
  const ParamInfo& info(int slot) const { return registry_[slot]; }

 private:
  struct LayerHead {
    ClassSlots mach, op, job;
  };
  int idx(int layer, int head) const { return layer * dims_.heads + head; }
  int add(const std::string& name, int rows, int cols, bool bias = false);

  HgatDims dims_;
  std::vector<ParamInfo> registry_;
  std::vector<double> values_;
  std::vector<LayerHead> slots_;
  MlpSlots mlp_;
};

// Glorot-uniform weights in registry order, zero biases. Bit-reproducible
// for a given (dims, seed).
HgatParams init_params(const HgatDims& dims, std::uint64_t seed);

struct ActionDistribution {
  std::vector<env::ActionEdge> actions;  // snapshot action order
  std::vector<double> probs;
};

// One entry per attention softmax group evaluated during a forward pass.
struct AttentionStats {
  std::vector<double> group_sums;
};

struct EmbeddingSet {
  std::vector<std::vector<double>> op;  // empty vector for masked operations
  std::vector<std::vector<double>> job;
  std::vector<std::vector<double>> machine;
};

EmbeddingSet hgat_forward(const HgatParams& params, const env::GraphSnapshot& snapshot,
                          AttentionStats* stats = nullptr);

// Distribution over the snapshot's feasible actions. Throws
// std::invalid_argument on a terminal snapshot or mismatched feature dims.
ActionDistribution policy_forward(const HgatParams& params, const env::GraphSnapshot& snapshot,
                                  AttentionStats* stats = nullptr);

// Cross entropy against a one-hot target: -log(probs[chosen]), probability
// floored at 1e-12.
double kl_loss(const std::vector<double>& probs, int chosen);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean loss over the batch and its exact gradient in parameter layout.
LossGrad policy_loss_grad(const HgatParams& params, const std::vector<env::TrainingSample>& batch);

}  // namespace fjs::nn
