#include "fjs/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fjs::nn {

namespace {

double stable_softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tape::NodeId Tape::alloc(Op op, int len) {
  Node n;
  n.op = op;
  n.off = static_cast<int>(vals_.size());
  n.len = len;
  vals_.resize(vals_.size() + static_cast<std::size_t>(len), 0.0);
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size()) - 1;
}

Tape::NodeId Tape::input(const double* data, int len) {
  const NodeId id = alloc(Op::kInput, len);
  std::copy(data, data + len, val(id));
  return id;
}

Tape::NodeId Tape::matvec(int param_offset, int rows, int cols, NodeId x) {
  if (size(x) != cols) throw std::logic_error("matvec: dimension mismatch");
  const NodeId id = alloc(Op::kMatVec, rows);
  Node& n = nodes_[id];
  n.a = x;
  n.p_off = param_offset;
  n.p_rows = rows;
  n.p_cols = cols;
  const double* W = params_ + param_offset;
  const double* xv = value(x);
  double* y = val(id);
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = W + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * xv[c];
    y[r] = acc;
  }
  return id;
}

Tape::NodeId Tape::add_param(NodeId x, int param_offset) {
  const int len = size(x);
  const NodeId id = alloc(Op::kAddParam, len);
  Node& n = nodes_[id];
  n.a = x;
  n.p_off = param_offset;
  const double* xv = value(x);
  const double* b = params_ + param_offset;
  double* y = val(id);
  for (int i = 0; i < len; ++i) y[i] = xv[i] + b[i];
  return id;
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  if (size(a) != size(b)) throw std::logic_error("add: dimension mismatch");
  const NodeId id = alloc(Op::kAdd, size(a));
  nodes_[id].a = a;
  nodes_[id].b = b;
  const double* av = value(a);
  const double* bv = value(b);
  double* y = val(id);
  for (int i = 0; i < size(a); ++i) y[i] = av[i] + bv[i];
  return id;
}

Tape::NodeId Tape::sum(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw std::logic_error("sum: empty operand list");
  const int len = size(xs[0]);
  const NodeId id = alloc(Op::kSum, len);
  nodes_[id].aux_off = static_cast<int>(aux_.size());
  nodes_[id].aux_len = static_cast<int>(xs.size());
  for (NodeId x : xs) {
    if (size(x) != len) throw std::logic_error("sum: dimension mismatch");
    aux_.push_back(x);
  }
  double* y = val(id);
  for (NodeId x : xs) {
    const double* xv = value(x);
    for (int i = 0; i < len; ++i) y[i] += xv[i];
  }
  return id;
}

Tape::NodeId Tape::scale(NodeId scalar, NodeId x) {
  if (size(scalar) != 1) throw std::logic_error("scale: scalar operand expected");
  const int len = size(x);
  const NodeId id = alloc(Op::kScale, len);
  nodes_[id].a = scalar;
  nodes_[id].b = x;
  const double s = this->scalar(scalar);
  const double* xv = value(x);
  double* y = val(id);
  for (int i = 0; i < len; ++i) y[i] = s * xv[i];
  return id;
}

Tape::NodeId Tape::scale_const(double c, NodeId x) {
  const int len = size(x);
  const NodeId id = alloc(Op::kScaleConst, len);
  nodes_[id].a = x;
  nodes_[id].c = c;
  const double* xv = value(x);
  double* y = val(id);
  for (int i = 0; i < len; ++i) y[i] = c * xv[i];
  return id;
}

Tape::NodeId Tape::dot(NodeId a, NodeId b) {
  if (size(a) != size(b)) throw std::logic_error("dot: dimension mismatch");
  const NodeId id = alloc(Op::kDot, 1);
  nodes_[id].a = a;
  nodes_[id].b = b;
  const double* av = value(a);
  const double* bv = value(b);
  double acc = 0.0;
  for (int i = 0; i < size(a); ++i) acc += av[i] * bv[i];
  *val(id) = acc;
  return id;
}

Tape::NodeId Tape::concat(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw std::logic_error("concat: empty operand list");
  int len = 0;
  for (NodeId x : xs) len += size(x);
  const NodeId id = alloc(Op::kConcat, len);
  nodes_[id].aux_off = static_cast<int>(aux_.size());
  nodes_[id].aux_len = static_cast<int>(xs.size());
  for (NodeId x : xs) aux_.push_back(x);
  double* y = val(id);
  for (NodeId x : xs) {
    const double* xv = value(x);
    y = std::copy(xv, xv + size(x), y);
  }
  return id;
}

Tape::NodeId Tape::gather(const std::vector<NodeId>& scalars) {
  if (scalars.empty()) throw std::logic_error("gather: empty operand list");
  const NodeId id = alloc(Op::kGather, static_cast<int>(scalars.size()));
  nodes_[id].aux_off = static_cast<int>(aux_.size());
  nodes_[id].aux_len = static_cast<int>(scalars.size());
  double* y = val(id);
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (size(scalars[i]) != 1) throw std::logic_error("gather: scalar operands expected");
    aux_.push_back(scalars[i]);
    y[i] = scalar(scalars[i]);
  }
  return id;
}

Tape::NodeId Tape::softmax(NodeId x) {
  const int len = size(x);
  const NodeId id = alloc(Op::kSoftmax, len);
  nodes_[id].a = x;
  const double* xv = value(x);
  double* y = val(id);
  double mx = xv[0];
  for (int i = 1; i < len; ++i) mx = std::max(mx, xv[i]);
  double total = 0.0;
  for (int i = 0; i < len; ++i) {
    y[i] = std::exp(xv[i] - mx);
    total += y[i];
  }
  for (int i = 0; i < len; ++i) y[i] /= total;
  return id;
}

Tape::NodeId Tape::normalize(NodeId x) {
  const int len = size(x);
  const NodeId id = alloc(Op::kNormalize, len);
  nodes_[id].a = x;
  const double* xv = value(x);
  double total = 0.0;
  for (int i = 0; i < len; ++i) total += xv[i];
  nodes_[id].c = total;
  double* y = val(id);
  for (int i = 0; i < len; ++i) y[i] = xv[i] / total;
  return id;
}

Tape::NodeId Tape::index(NodeId x, int i) {
  if (i < 0 || i >= size(x)) throw std::logic_error("index: out of range");
  const NodeId id = alloc(Op::kIndex, 1);
  nodes_[id].a = x;
  nodes_[id].b = i;
  *val(id) = value(x)[i];
  return id;
}

Tape::NodeId Tape::exp(NodeId scalar_node) {
  if (size(scalar_node) != 1) throw std::logic_error("exp: scalar operand expected");
  const NodeId id = alloc(Op::kExp, 1);
  nodes_[id].a = scalar_node;
  *val(id) = std::exp(scalar(scalar_node));
  return id;
}

Tape::NodeId Tape::log_clamped(NodeId scalar_node, double floor) {
  if (size(scalar_node) != 1) throw std::logic_error("log: scalar operand expected");
  const NodeId id = alloc(Op::kLogClamped, 1);
  nodes_[id].a = scalar_node;
  nodes_[id].c = floor;
  *val(id) = std::log(std::max(scalar(scalar_node), floor));
  return id;
}

Tape::NodeId Tape::softplus(NodeId x) {
  const int len = size(x);
  const NodeId id = alloc(Op::kSoftplus, len);
  nodes_[id].a = x;
  const double* xv = value(x);
  double* y = val(id);
  for (int i = 0; i < len; ++i) y[i] = stable_softplus(xv[i]);
  return id;
}

void Tape::backward(NodeId node, double seed, std::vector<double>& param_grad) {
  if (size(node) != 1) throw std::logic_error("backward: scalar root expected");
  if (param_grad.size() != param_count_)
    throw std::logic_error("backward: gradient buffer size mismatch");

  grads_.assign(vals_.size(), 0.0);
  grads_[nodes_[node].off] = seed;

  for (int id = node; id >= 0; --id) {
    const Node& n = nodes_[id];
    const double* g = grads_.data() + n.off;
    bool live = false;
    for (int i = 0; i < n.len && !live; ++i) live = g[i] != 0.0;
    if (!live) continue;

    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kMatVec: {
        const double* xv = value(n.a);
        const double* W = params_ + n.p_off;
        double* gx = grads_.data() + nodes_[n.a].off;
        double* gW = param_grad.data() + n.p_off;
        for (int r = 0; r < n.p_rows; ++r) {
          const double gr = g[r];
          if (gr == 0.0) continue;
          const double* row = W + static_cast<std::size_t>(r) * n.p_cols;
          double* grow = gW + static_cast<std::size_t>(r) * n.p_cols;
          for (int c = 0; c < n.p_cols; ++c) {
            grow[c] += gr * xv[c];
            gx[c] += gr * row[c];
          }
        }
        break;
      }
      case Op::kAddParam: {
        double* gx = grads_.data() + nodes_[n.a].off;
        double* gb = param_grad.data() + n.p_off;
        for (int i = 0; i < n.len; ++i) {
          gx[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kAdd: {
        double* ga = grads_.data() + nodes_[n.a].off;
        double* gb = grads_.data() + nodes_[n.b].off;
        for (int i = 0; i < n.len; ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kSum: {
        for (int k = 0; k < n.aux_len; ++k) {
          double* gx = grads_.data() + nodes_[aux_[n.aux_off + k]].off;
          for (int i = 0; i < n.len; ++i) gx[i] += g[i];
        }
        break;
      }
      case Op::kScale: {
        const double s = vals_[nodes_[n.a].off];
        const double* xv = value(n.b);
        double* gs = grads_.data() + nodes_[n.a].off;
        double* gx = grads_.data() + nodes_[n.b].off;
        double acc = 0.0;
        for (int i = 0; i < n.len; ++i) {
          acc += g[i] * xv[i];
          gx[i] += s * g[i];
        }
        gs[0] += acc;
        break;
      }
      case Op::kScaleConst: {
        double* gx = grads_.data() + nodes_[n.a].off;
        for (int i = 0; i < n.len; ++i) gx[i] += n.c * g[i];
        break;
      }
      case Op::kDot: {
        const double* av = value(n.a);
        const double* bv = value(n.b);
        double* ga = grads_.data() + nodes_[n.a].off;
        double* gb = grads_.data() + nodes_[n.b].off;
        const double g0 = g[0];
        for (int i = 0; i < nodes_[n.a].len; ++i) {
          ga[i] += g0 * bv[i];
          gb[i] += g0 * av[i];
        }
        break;
      }
      case Op::kConcat: {
        int pos = 0;
        for (int k = 0; k < n.aux_len; ++k) {
          const Node& p = nodes_[aux_[n.aux_off + k]];
          double* gx = grads_.data() + p.off;
          for (int i = 0; i < p.len; ++i) gx[i] += g[pos + i];
          pos += p.len;
        }
        break;
      }
      case Op::kGather: {
        for (int k = 0; k < n.aux_len; ++k)
          grads_[nodes_[aux_[n.aux_off + k]].off] += g[k];
        break;
      }
      case Op::kSoftmax: {
        const double* y = value(id);
        double* gx = grads_.data() + nodes_[n.a].off;
        double gy = 0.0;
        for (int i = 0; i < n.len; ++i) gy += g[i] * y[i];
        for (int i = 0; i < n.len; ++i) gx[i] += y[i] * (g[i] - gy);
        break;
      }
      case Op::kNormalize: {
        const double* y = value(id);
        double* gx = grads_.data() + nodes_[n.a].off;
        double gy = 0.0;
        for (int i = 0; i < n.len; ++i) gy += g[i] * y[i];
        for (int i = 0; i < n.len; ++i) gx[i] += (g[i] - gy) / n.c;
        break;
      }
      case Op::kIndex:
        grads_[nodes_[n.a].off + n.b] += g[0];
        break;
      case Op::kExp:
        grads_[nodes_[n.a].off] += g[0] * vals_[n.off];
        break;
      case Op::kLogClamped: {
        const double x = vals_[nodes_[n.a].off];
        if (x > n.c) grads_[nodes_[n.a].off] += g[0] / x;
        break;
      }
      case Op::kSoftplus: {
        const double* xv = value(n.a);
        double* gx = grads_.data() + nodes_[n.a].off;
        for (int i = 0; i < n.len; ++i) gx[i] += g[i] * sigmoid(xv[i]);
        break;
      }
    }
  }
}

void Tape::reset() {
  nodes_.clear();
  vals_.clear();
  grads_.clear();
  aux_.clear();
}

}  // namespace fjs::nn
