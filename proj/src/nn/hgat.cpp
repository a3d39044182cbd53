#include "fjs/nn/hgat.hpp"

#include <cmath>
#include <stdexcept>

#include "fjs/rng.hpp"

namespace fjs::nn {

int HgatParams::add(const std::string& name, int rows, int cols, bool bias) {
  ParamInfo p;
  p.name = name;
  p.rows = rows;
  p.cols = cols;
  p.offset = static_cast<int>(values_.size());
  p.bias = bias;
  registry_.push_back(p);
  values_.resize(values_.size() + static_cast<std::size_t>(rows) * cols, 0.0);
  return static_cast<int>(registry_.size()) - 1;
}

HgatParams::HgatParams(const HgatDims& dims) : dims_(dims) {
  if (dims.hidden < 1 || dims.layers < 1 || dims.heads < 1)
    throw std::invalid_argument("network dims must be positive");
  const int d = dims.hidden;

  for (int l = 0; l < dims.layers; ++l) {
    const int in_op = l == 0 ? dims.op_feat : dims.embedding_dim();
    const int in_job = l == 0 ? dims.job_feat : dims.embedding_dim();
    const int in_mach = l == 0 ? dims.machine_feat : dims.embedding_dim();

    for (int h = 0; h < dims.heads; ++h) {
      const std::string pre = "l" + std::to_string(l) + ".h" + std::to_string(h) + ".";
      LayerHead lh;

      lh.mach.self = add(pre + "mach.self", d, in_mach);
      lh.mach.rel[0] = {add(pre + "mach.mm.attn_dst", d, in_mach),
                        add(pre + "mach.mm.attn_src", d, in_mach), -1,
                        add(pre + "mach.mm.msg_src", d, in_mach), -1};
      lh.mach.rel[1] = {add(pre + "mach.om.attn_dst", d, in_mach),
                        add(pre + "mach.om.attn_src", d, in_op),
                        add(pre + "mach.om.attn_edge", d, dims.om_edge_feat),
                        add(pre + "mach.om.msg_src", d, in_op),
                        add(pre + "mach.om.msg_edge", d, dims.om_edge_feat)};
      lh.mach.rel[2] = {add(pre + "mach.jm.attn_dst", d, in_mach),
                        add(pre + "mach.jm.attn_src", d, in_job),
                        add(pre + "mach.jm.attn_edge", d, dims.mj_edge_feat),
                        add(pre + "mach.jm.msg_src", d, in_job),
                        add(pre + "mach.jm.msg_edge", d, dims.mj_edge_feat)};

      lh.op.self = add(pre + "op.self", d, in_op);
      lh.op.rel[0] = {add(pre + "op.pred.attn_dst", d, in_op),
                      add(pre + "op.pred.attn_src", d, in_op), -1,
                      add(pre + "op.pred.msg_src", d, in_op), -1};
      lh.op.rel[1] = {add(pre + "op.mo.attn_dst", d, in_op),
                      add(pre + "op.mo.attn_src", d, in_mach),
                      add(pre + "op.mo.attn_edge", d, dims.om_edge_feat),
                      add(pre + "op.mo.msg_src", d, in_mach),
                      add(pre + "op.mo.msg_edge", d, dims.om_edge_feat)};
      lh.op.rel[2] = {add(pre + "op.jo.attn_dst", d, in_op),
                      add(pre + "op.jo.attn_src", d, in_job), -1,
                      add(pre + "op.jo.msg_src", d, in_job), -1};

      lh.job.self = add(pre + "job.self", d, in_job);
      lh.job.rel[0] = {add(pre + "job.jj.attn_dst", d, in_job),
                       add(pre + "job.jj.attn_src", d, in_job), -1,
                       add(pre + "job.jj.msg_src", d, in_job), -1};
      lh.job.rel[1] = {add(pre + "job.oj.attn_dst", d, in_job),
                       add(pre + "job.oj.attn_src", d, in_op), -1,
                       add(pre + "job.oj.msg_src", d, in_op), -1};
      lh.job.rel[2] = {add(pre + "job.mj.attn_dst", d, in_job),
                       add(pre + "job.mj.attn_src", d, in_mach),
                       add(pre + "job.mj.attn_edge", d, dims.mj_edge_feat),
                       add(pre + "job.mj.msg_src", d, in_mach),
                       add(pre + "job.mj.msg_edge", d, dims.mj_edge_feat)};

      slots_.push_back(lh);
    }
  }

  const int emb = dims.embedding_dim();
  mlp_.w1 = add("mlp.w1", d, 2 * emb + dims.mj_edge_feat);
  mlp_.b1 = add("mlp.b1", d, 1, true);
  mlp_.w2 = add("mlp.w2", d, d);
  mlp_.b2 = add("mlp.b2", d, 1, true);
  mlp_.w3 = add("mlp.w3", 1, d);
  mlp_.b3 = add("mlp.b3", 1, 1, true);
}

HgatParams init_params(const HgatDims& dims, std::uint64_t seed) {
  HgatParams params(dims);
  Rng rng(seed);
  for (const ParamInfo& info : params.registry()) {
    if (info.bias) continue;  // biases stay zero and consume no draws
    const double limit = std::sqrt(6.0 / static_cast<double>(info.rows + info.cols));
    double* v = params.values().data() + info.offset;
    const int n = info.rows * info.cols;
    for (int i = 0; i < n; ++i) v[i] = rng.next_real(-limit, limit);
  }
  return params;
}

namespace {

struct Adjacency {
  std::vector<std::vector<int>> mach_op_edges;  // indices into om_edges
  std::vector<std::vector<int>> mach_mj_edges;  // indices into mj_edges
  std::vector<int> op_pred;                     // global op index or -1
  std::vector<std::vector<int>> op_om_edges;
  std::vector<int> op_job;
  std::vector<std::vector<int>> job_ops;
  std::vector<std::vector<int>> job_mj_edges;
};

Adjacency build_adjacency(const env::GraphSnapshot& g) {
  Adjacency a;
  a.mach_op_edges.resize(g.n_machines);
  a.mach_mj_edges.resize(g.n_machines);
  a.op_pred.assign(g.n_ops, -1);
  a.op_om_edges.resize(g.n_ops);
  a.op_job.assign(g.n_ops, -1);
  a.job_ops.resize(g.n_jobs);
  a.job_mj_edges.resize(g.n_jobs);

  for (std::size_t e = 0; e < g.om_edges.size(); ++e) {
    a.mach_op_edges[g.om_edges[e].machine].push_back(static_cast<int>(e));
    a.op_om_edges[g.om_edges[e].op].push_back(static_cast<int>(e));
  }
  for (const auto& p : g.prec_edges) a.op_pred[p.succ] = p.pred;
  for (const auto& m : g.member_edges) {
    a.op_job[m.op] = m.job;
    a.job_ops[m.job].push_back(m.op);
  }
  for (std::size_t e = 0; e < g.mj_edges.size(); ++e) {
    a.mach_mj_edges[g.mj_edges[e].machine].push_back(static_cast<int>(e));
    a.job_mj_edges[g.mj_edges[e].job].push_back(static_cast<int>(e));
  }
  return a;
}

class ForwardBuilder {
 public:
  ForwardBuilder(const HgatParams& params, const env::GraphSnapshot& g, Tape& tape,
                 AttentionStats* stats)
      : P(params), g_(g), tape_(tape), stats_(stats), adj_(build_adjacency(g)) {
    const HgatDims& d = P.dims();
    if (d.op_feat != 5 || d.job_feat != 4 || d.machine_feat != 3 || d.om_edge_feat != 4 ||
        d.mj_edge_feat != 4)
      throw std::invalid_argument("model feature dims do not match the state encoding");
    tape_.bind(P.values().data(), P.size());
    inv_sqrt_d_ = 1.0 / std::sqrt(static_cast<double>(d.hidden));
  }

  void run() {
    op_emb_.assign(g_.n_ops, -1);
    job_emb_.resize(g_.n_jobs);
    mach_emb_.resize(g_.n_machines);

    for (int i = 0; i < g_.n_ops; ++i)
      if (!g_.op_scheduled[i]) op_emb_[i] = tape_.input(g_.op_feat[i].data(), 5);
    for (int j = 0; j < g_.n_jobs; ++j) job_emb_[j] = tape_.input(g_.job_feat[j].data(), 4);
    for (int m = 0; m < g_.n_machines; ++m)
      mach_emb_[m] = tape_.input(g_.mach_feat[m].data(), 3);
    om_in_.resize(g_.om_edges.size());
    for (std::size_t e = 0; e < g_.om_edges.size(); ++e)
      om_in_[e] = tape_.input(g_.om_edges[e].feat.data(), 4);
    mj_in_.resize(g_.mj_edges.size());
    for (std::size_t e = 0; e < g_.mj_edges.size(); ++e)
      mj_in_[e] = tape_.input(g_.mj_edges[e].feat.data(), 4);

    for (int l = 0; l < P.dims().layers; ++l) layer(l);
  }

  std::vector<Tape::NodeId> policy_scores() {
    if (g_.mj_edges.empty())
      throw std::invalid_argument("terminal state: the policy has no action to score");
    const MlpSlots& mlp = P.mlp_slots();
    std::vector<Tape::NodeId> mus;
    mus.reserve(g_.mj_edges.size());
    for (std::size_t e = 0; e < g_.mj_edges.size(); ++e) {
      const auto& edge = g_.mj_edges[e];
      const Tape::NodeId x =
          tape_.concat({job_emb_[edge.job], mach_emb_[edge.machine], mj_in_[e]});
      const Tape::NodeId h1 = tape_.softplus(tape_.add_param(mv(mlp.w1, x), off(mlp.b1)));
      const Tape::NodeId h2 = tape_.softplus(tape_.add_param(mv(mlp.w2, h1), off(mlp.b2)));
      const Tape::NodeId s = tape_.add_param(mv(mlp.w3, h2), off(mlp.b3));
      mus.push_back(tape_.exp(tape_.index(s, 0)));
    }
    return mus;
  }

  Tape::NodeId op_node(int i) const { return op_emb_[i]; }
  Tape::NodeId job_node(int j) const { return job_emb_[j]; }
  Tape::NodeId mach_node(int m) const { return mach_emb_[m]; }

 private:
  Tape::NodeId mv(int slot, Tape::NodeId x) {
    const ParamInfo& info = P.info(slot);
    return tape_.matvec(info.offset, info.rows, info.cols, x);
  }
  int off(int slot) const { return P.info(slot).offset; }

  // Attention-weighted aggregation for one relation at one destination.
  // Returns -1 when the neighbor list is empty.
  Tape::NodeId attend(const RelSlots& rel, Tape::NodeId dst, const std::vector<Tape::NodeId>& srcs,
                      const std::vector<Tape::NodeId>& edges) {
    if (srcs.empty()) return -1;
    const Tape::NodeId q = mv(rel.attn_dst, dst);
    std::vector<Tape::NodeId> scores;
    scores.reserve(srcs.size());
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      Tape::NodeId key = mv(rel.attn_src, srcs[i]);
      if (rel.attn_edge >= 0) key = tape_.add(key, mv(rel.attn_edge, edges[i]));
      scores.push_back(tape_.scale_const(inv_sqrt_d_, tape_.dot(q, key)));
    }
    const Tape::NodeId alpha = tape_.softmax(tape_.gather(scores));
    if (stats_ != nullptr) {
      double s = 0.0;
      const double* a = tape_.value(alpha);
      for (int i = 0; i < tape_.size(alpha); ++i) s += a[i];
      stats_->group_sums.push_back(s);
    }
    std::vector<Tape::NodeId> parts;
    parts.reserve(srcs.size());
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      Tape::NodeId msg = mv(rel.msg_src, srcs[i]);
      if (rel.msg_edge >= 0) msg = tape_.add(msg, mv(rel.msg_edge, edges[i]));
      parts.push_back(tape_.scale(tape_.index(alpha, static_cast<int>(i)), msg));
    }
    return tape_.sum(parts);
  }

  void layer(int l) {
    const int heads = P.dims().heads;
    std::vector<std::vector<Tape::NodeId>> next_op(heads), next_job(heads), next_mach(heads);

    for (int h = 0; h < heads; ++h) {
      const ClassSlots& mach_slots = P.machine_slots(l, h);
      const ClassSlots& op_slots = P.op_slots(l, h);
      const ClassSlots& job_slots = P.job_slots(l, h);

      next_mach[h].assign(g_.n_machines, -1);
      for (int m = 0; m < g_.n_machines; ++m) {
        std::vector<Tape::NodeId> parts{mv(mach_slots.self, mach_emb_[m])};

        std::vector<Tape::NodeId> peers;
        for (int m2 = 0; m2 < g_.n_machines; ++m2)
          if (m2 != m) peers.push_back(mach_emb_[m2]);
        if (Tape::NodeId c = attend(mach_slots.rel[0], mach_emb_[m], peers, {}); c >= 0)
          parts.push_back(c);

        std::vector<Tape::NodeId> ops, op_edges;
        for (int e : adj_.mach_op_edges[m]) {
          ops.push_back(op_emb_[g_.om_edges[e].op]);
          op_edges.push_back(om_in_[e]);
        }
        if (Tape::NodeId c = attend(mach_slots.rel[1], mach_emb_[m], ops, op_edges); c >= 0)
          parts.push_back(c);

        std::vector<Tape::NodeId> jobs, job_edges;
        for (int e : adj_.mach_mj_edges[m]) {
          jobs.push_back(job_emb_[g_.mj_edges[e].job]);
          job_edges.push_back(mj_in_[e]);
        }
        if (Tape::NodeId c = attend(mach_slots.rel[2], mach_emb_[m], jobs, job_edges); c >= 0)
          parts.push_back(c);

        next_mach[h][m] = tape_.sum(parts);
      }

      next_op[h].assign(g_.n_ops, -1);
      for (int i = 0; i < g_.n_ops; ++i) {
        if (op_emb_[i] < 0) continue;
        std::vector<Tape::NodeId> parts{mv(op_slots.self, op_emb_[i])};

        if (adj_.op_pred[i] >= 0) {
          if (Tape::NodeId c =
                  attend(op_slots.rel[0], op_emb_[i], {op_emb_[adj_.op_pred[i]]}, {});
              c >= 0)
            parts.push_back(c);
        }

        std::vector<Tape::NodeId> machines, edges;
        for (int e : adj_.op_om_edges[i]) {
          machines.push_back(mach_emb_[g_.om_edges[e].machine]);
          edges.push_back(om_in_[e]);
        }
        if (Tape::NodeId c = attend(op_slots.rel[1], op_emb_[i], machines, edges); c >= 0)
          parts.push_back(c);

        if (adj_.op_job[i] >= 0) {
          if (Tape::NodeId c = attend(op_slots.rel[2], op_emb_[i], {job_emb_[adj_.op_job[i]]}, {});
              c >= 0)
            parts.push_back(c);
        }
        next_op[h][i] = tape_.sum(parts);
      }

      next_job[h].assign(g_.n_jobs, -1);
      for (int j = 0; j < g_.n_jobs; ++j) {
        std::vector<Tape::NodeId> parts{mv(job_slots.self, job_emb_[j])};

        std::vector<Tape::NodeId> peers;
        for (int j2 = 0; j2 < g_.n_jobs; ++j2)
          if (j2 != j) peers.push_back(job_emb_[j2]);
        if (Tape::NodeId c = attend(job_slots.rel[0], job_emb_[j], peers, {}); c >= 0)
          parts.push_back(c);

        std::vector<Tape::NodeId> members;
        for (int o : adj_.job_ops[j]) members.push_back(op_emb_[o]);
        if (Tape::NodeId c = attend(job_slots.rel[1], job_emb_[j], members, {}); c >= 0)
          parts.push_back(c);

        std::vector<Tape::NodeId> machines, edges;
        for (int e : adj_.job_mj_edges[j]) {
          machines.push_back(mach_emb_[g_.mj_edges[e].machine]);
          edges.push_back(mj_in_[e]);
        }
        if (Tape::NodeId c = attend(job_slots.rel[2], job_emb_[j], machines, edges); c >= 0)
          parts.push_back(c);

        next_job[h][j] = tape_.sum(parts);
      }
    }

    // concatenate heads into the next layer's inputs
    auto merge = [&](const std::vector<std::vector<Tape::NodeId>>& heads_out, int node) {
      if (heads == 1) return heads_out[0][node];
      std::vector<Tape::NodeId> pieces;
      pieces.reserve(heads);
      for (int h = 0; h < heads; ++h) pieces.push_back(heads_out[h][node]);
      return tape_.concat(pieces);
    };
    for (int m = 0; m < g_.n_machines; ++m) mach_emb_[m] = merge(next_mach, m);
    for (int j = 0; j < g_.n_jobs; ++j) job_emb_[j] = merge(next_job, j);
    for (int i = 0; i < g_.n_ops; ++i)
      if (op_emb_[i] >= 0) op_emb_[i] = merge(next_op, i);
  }

  const HgatParams& P;
  const env::GraphSnapshot& g_;
  Tape& tape_;
  AttentionStats* stats_;
  Adjacency adj_;
  double inv_sqrt_d_ = 1.0;

  std::vector<Tape::NodeId> op_emb_, job_emb_, mach_emb_;
  std::vector<Tape::NodeId> om_in_, mj_in_;
};

}  // namespace

EmbeddingSet hgat_forward(const HgatParams& params, const env::GraphSnapshot& snapshot,
                          AttentionStats* stats) {
  Tape tape;
  ForwardBuilder fb(params, snapshot, tape, stats);
  fb.run();
  EmbeddingSet out;
  out.op.resize(snapshot.n_ops);
  out.job.resize(snapshot.n_jobs);
  out.machine.resize(snapshot.n_machines);
  for (int i = 0; i < snapshot.n_ops; ++i)
    if (fb.op_node(i) >= 0) out.op[i] = tape.value_vec(fb.op_node(i));
  for (int j = 0; j < snapshot.n_jobs; ++j) out.job[j] = tape.value_vec(fb.job_node(j));
  for (int m = 0; m < snapshot.n_machines; ++m)
    out.machine[m] = tape.value_vec(fb.mach_node(m));
  return out;
}

ActionDistribution policy_forward(const HgatParams& params, const env::GraphSnapshot& snapshot,
                                  AttentionStats* stats) {
  Tape tape;
  ForwardBuilder fb(params, snapshot, tape, stats);
  fb.run();
  const auto mus = fb.policy_scores();
  const Tape::NodeId pi = tape.normalize(tape.gather(mus));
  ActionDistribution dist;
  dist.actions = snapshot.actions();
  dist.probs = tape.value_vec(pi);
  return dist;
}

double kl_loss(const std::vector<double>& probs, int chosen) {
  if (chosen < 0 || static_cast<std::size_t>(chosen) >= probs.size())
    throw std::invalid_argument("chosen action out of range");
  return -std::log(std::max(probs[chosen], 1e-12));
}

LossGrad policy_loss_grad(const HgatParams& params,
                          const std::vector<env::TrainingSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  LossGrad out;
  out.grad.assign(params.size(), 0.0);
  const double w = 1.0 / static_cast<double>(batch.size());

  Tape tape;
  for (const auto& sample : batch) {
    tape.reset();
    ForwardBuilder fb(params, sample.snapshot, tape, nullptr);
    fb.run();
    const auto mus = fb.policy_scores();
    if (sample.action_index < 0 || static_cast<std::size_t>(sample.action_index) >= mus.size())
      throw std::logic_error("sample action index out of range");
    const Tape::NodeId pi = tape.normalize(tape.gather(mus));
    const Tape::NodeId loss =
        tape.scale_const(-1.0, tape.log_clamped(tape.index(pi, sample.action_index)));
    out.loss += w * tape.scalar(loss);
    tape.backward(loss, w, out.grad);
  }
  return out;
}

}  // namespace fjs::nn
