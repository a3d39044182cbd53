#pragma once

#include <cstddef>
#include <vector>

namespace fjs::nn {

// Reverse-mode differentiation over vector-valued nodes. Values are computed
// eagerly as nodes are created; backward() then accumulates exact gradients
// with respect to an external flat parameter buffer bound via bind().
//
// Parameters never enter the tape as nodes: matvec/add_param reference the
// bound buffer directly by offset, and backward() writes their gradients
// into a caller-provided buffer of the same layout.
class Tape {
 public:
  using NodeId = int;

  void bind(const double* params, std::size_t count) {
    params_ = params;
    param_count_ = count;
  }

  NodeId input(const double* data, int len);
  NodeId input(const std::vector<double>& data) {
    return input(data.data(), static_cast<int>(data.size()));
  }

  // y = W x with W a bound parameter block of rows x cols, row-major.
  NodeId matvec(int param_offset, int rows, int cols, NodeId x);
  // y = x + b with b a bound parameter block of len(x) entries.
  NodeId add_param(NodeId x, int param_offset);
  NodeId add(NodeId a, NodeId b);
  NodeId sum(const std::vector<NodeId>& xs);
  NodeId scale(NodeId scalar, NodeId x);
  NodeId scale_const(double c, NodeId x);
  NodeId dot(NodeId a, NodeId b);
  NodeId concat(const std::vector<NodeId>& xs);
  // One scalar node per entry -> a single vector node.
  NodeId gather(const std::vector<NodeId>& scalars);
  // Shift-invariant softmax; the subtracted maximum is treated as constant.
  NodeId softmax(NodeId x);
  // y = x / sum(x); callers guarantee a positive sum.
  NodeId normalize(NodeId x);
  NodeId index(NodeId x, int i);
  NodeId exp(NodeId scalar);
  // log(max(x, floor)); zero gradient on the clamped branch.
  NodeId log_clamped(NodeId scalar, double floor = 1e-12);
  NodeId softplus(NodeId x);

  int size(NodeId id) const { return nodes_[id].len; }
  const double* value(NodeId id) const { return vals_.data() + nodes_[id].off; }
  double scalar(NodeId id) const { return vals_[nodes_[id].off]; }
  std::vector<double> value_vec(NodeId id) const {
    const double* v = value(id);
    return std::vector<double>(v, v + size(id));
  }

  // d(seed * node)/d(params), accumulated into param_grad (same layout as the
  // bound buffer). The node must be scalar.
  void backward(NodeId node, double seed, std::vector<double>& param_grad);

  void reset();

 private:
  enum class Op {
    kInput,
    kMatVec,
    kAddParam,
    kAdd,
    kSum,
    kScale,
    kScaleConst,
    kDot,
    kConcat,
    kGather,
    kSoftmax,
    kNormalize,
    kIndex,
    kExp,
    kLogClamped,
    kSoftplus,
  };

  struct Node {
    Op op;
    int off = 0;  // into vals_/grads_
    int len = 0;
    int a = -1;  // parent node, or int payload for kIndex
    int b = -1;
    int aux_off = 0, aux_len = 0;  // parent list in aux_
    double c = 0.0;                // constant payload
    int p_off = 0, p_rows = 0, p_cols = 0;  // parameter block
  };

  NodeId alloc(Op op, int len);
  double* val(NodeId id) { return vals_.data() + nodes_[id].off; }

  std::vector<Node> nodes_;
  std::vector<double> vals_;
  std::vector<double> grads_;
  std::vector<int> aux_;
  const double* params_ = nullptr;
  std::size_t param_count_ = 0;
};

}  // namespace fjs::nn
