#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uabsim/rng.hpp"

namespace uabsim {

// Dueling MLP: shared ReLU trunk, then a value head V(o) and an advantage
// head A(o, a), combined as Q = V + A - mean_a A. Parameters live in one
// flat vector so the optimizer, checkpointing, and finite-difference tests
// all see the same storage.
class QFunction {
 public:
  QFunction() = default;

  QFunction(int input_dim, int n_actions, std::vector<int> trunk_widths,
            int head_width, std::uint64_t seed)
      : input_dim_(input_dim),
        n_actions_(n_actions),
        trunk_widths_(std::move(trunk_widths)),
        head_width_(head_width) {
    build_layout();
    Rng rng(mix_seed(seed, 0x9f37u));
    for (const auto& layer : layers_) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
      for (int i = 0; i < layer.in * layer.out; ++i) {
        params_[layer.w_off + i] = rng.uniform(-scale, scale);
      }
      for (int i = 0; i < layer.out; ++i) params_[layer.b_off + i] = 0.0;
    }
  }

  int input_dim() const { return input_dim_; }
  int n_actions() const { return n_actions_; }
  const std::vector<int>& trunk_widths() const { return trunk_widths_; }
  int head_width() const { return head_width_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  size_t param_count() const { return params_.size(); }

  struct Activation {
    std::vector<std::vector<double>> pre;   // pre-nonlinearity per layer
    std::vector<std::vector<double>> post;  // post-nonlinearity per layer
    double value = 0.0;
    std::vector<double> advantages;
    std::vector<double> q;
  };

  // Q(o, .) for all actions; the caller may keep the activation record for
  // a subsequent backward pass.
  std::vector<double> forward(const std::vector<double>& obs,
                              Activation* act = nullptr) const {
    if (static_cast<int>(obs.size()) != input_dim_) {
      throw std::invalid_argument("observation dimension mismatch");
    }
    Activation local;
    Activation& a = act ? *act : local;
    a.pre.assign(layers_.size(), {});
    a.post.assign(layers_.size(), {});

    const std::vector<double>* input = &obs;
    // trunk
    for (size_t l = 0; l < n_trunk_; ++l) {
      dense(l, *input, a.pre[l]);
      a.post[l] = a.pre[l];
      relu(a.post[l]);
      input = &a.post[l];
    }
    const std::vector<double>& trunk_out = n_trunk_ ? a.post[n_trunk_ - 1] : obs;
    // value head: hidden + scalar output
    dense(n_trunk_, trunk_out, a.pre[n_trunk_]);
    a.post[n_trunk_] = a.pre[n_trunk_];
    relu(a.post[n_trunk_]);
    dense(n_trunk_ + 1, a.post[n_trunk_], a.pre[n_trunk_ + 1]);
    a.post[n_trunk_ + 1] = a.pre[n_trunk_ + 1];
    a.value = a.post[n_trunk_ + 1][0];
    // advantage head
    dense(n_trunk_ + 2, trunk_out, a.pre[n_trunk_ + 2]);
    a.post[n_trunk_ + 2] = a.pre[n_trunk_ + 2];
    relu(a.post[n_trunk_ + 2]);
    dense(n_trunk_ + 3, a.post[n_trunk_ + 2], a.pre[n_trunk_ + 3]);
    a.post[n_trunk_ + 3] = a.pre[n_trunk_ + 3];
    a.advantages = a.post[n_trunk_ + 3];

    double mean_adv = 0.0;
    for (double v : a.advantages) mean_adv += v;
    mean_adv /= n_actions_;
    a.q.resize(n_actions_);
    for (int i = 0; i < n_actions_; ++i) {
      a.q[i] = a.value + a.advantages[i] - mean_adv;
    }
    return a.q;
  }

  // Accumulates dLoss/dparams into `grad` for one sample, given
  // dLoss/dQ(o, action) = dq. Requires the activation from forward(obs).
  void backward(const std::vector<double>& obs, const Activation& act, int action,
                double dq, std::vector<double>& grad) const {
    // dQ/dV = 1, dQ/dA_j = [j == action] - 1/|A|
    std::vector<double> d_adv(n_actions_);
    for (int j = 0; j < n_actions_; ++j) {
      d_adv[j] = dq * ((j == action ? 1.0 : 0.0) - 1.0 / n_actions_);
    }
    std::vector<double> d_value{dq};

    const std::vector<double>& trunk_out =
        n_trunk_ ? act.post[n_trunk_ - 1] : obs;
    std::vector<double> d_trunk(trunk_out.size(), 0.0);

    // advantage head backward
    std::vector<double> d_hidden;
    dense_backward(n_trunk_ + 3, act.post[n_trunk_ + 2], d_adv, grad, d_hidden);
    relu_backward(act.pre[n_trunk_ + 2], d_hidden);
    std::vector<double> d_in;
    dense_backward(n_trunk_ + 2, trunk_out, d_hidden, grad, d_in);
    for (size_t i = 0; i < d_trunk.size(); ++i) d_trunk[i] += d_in[i];

    // value head backward
    dense_backward(n_trunk_ + 1, act.post[n_trunk_], d_value, grad, d_hidden);
    relu_backward(act.pre[n_trunk_], d_hidden);
    dense_backward(n_trunk_, trunk_out, d_hidden, grad, d_in);
    for (size_t i = 0; i < d_trunk.size(); ++i) d_trunk[i] += d_in[i];

    // trunk backward
    std::vector<double> d_cur = d_trunk;
    for (size_t l = n_trunk_; l-- > 0;) {
      relu_backward(act.pre[l], d_cur);
      const std::vector<double>& in = l == 0 ? obs : act.post[l - 1];
      dense_backward(l, in, d_cur, grad, d_in);
      d_cur = d_in;
    }
  }

  friend bool operator==(const QFunction& a, const QFunction& b) {
    return a.input_dim_ == b.input_dim_ && a.n_actions_ == b.n_actions_ &&
           a.trunk_widths_ == b.trunk_widths_ && a.head_width_ == b.head_width_ &&
           a.params_ == b.params_;
  }

 private:
  struct Layer {
    int in = 0, out = 0;
    size_t w_off = 0, b_off = 0;
  };

  void build_layout() {
    layers_.clear();
    size_t off = 0;
    auto add = [&](int in, int out) {
      layers_.push_back({in, out, off, off + static_cast<size_t>(in) * out});
      off += static_cast<size_t>(in) * out + out;
    };
    int prev = input_dim_;
    for (int w : trunk_widths_) {
      add(prev, w);
      prev = w;
    }
    n_trunk_ = layers_.size();
    add(prev, head_width_);  // value hidden
    add(head_width_, 1);     // value out
    add(prev, head_width_);  // advantage hidden
    add(head_width_, n_actions_);
    params_.assign(off, 0.0);
  }

  void dense(size_t l, const std::vector<double>& in, std::vector<double>& out) const {
    const Layer& layer = layers_[l];
    out.assign(layer.out, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      double acc = params_[layer.b_off + o];
      const double* w = &params_[layer.w_off + static_cast<size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) acc += w[i] * in[i];
      out[o] = acc;
    }
  }

  void dense_backward(size_t l, const std::vector<double>& in,
                      const std::vector<double>& d_out, std::vector<double>& grad,
                      std::vector<double>& d_in) const {
    const Layer& layer = layers_[l];
    d_in.assign(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double g = d_out[o];
      grad[layer.b_off + o] += g;
      const size_t w_base = layer.w_off + static_cast<size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        grad[w_base + i] += g * in[i];
        d_in[i] += g * params_[w_base + i];
      }
    }
  }

  static void relu(std::vector<double>& v) {
    for (double& x : v) x = std::max(x, 0.0);
  }
  static void relu_backward(const std::vector<double>& pre, std::vector<double>& d) {
    for (size_t i = 0; i < d.size(); ++i) {
      if (pre[i] <= 0.0) d[i] = 0.0;
    }
  }

  int input_dim_ = 0;
  int n_actions_ = 0;
  std::vector<int> trunk_widths_;
  int head_width_ = 0;
  std::vector<Layer> layers_;
  size_t n_trunk_ = 0;
  std::vector<double> params_;
};

inline std::vector<double> q_forward(const QFunction& net,
                                     const std::vector<double>& obs) {
  return net.forward(obs);
}

// Argmax over Q with lowest-index tie break.
inline int greedy_action(const QFunction& net, const std::vector<double>& obs) {
  const auto q = net.forward(obs);
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

struct Experience {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool terminal = false;
};

// Fixed-capacity FIFO replay store with uniform sampling.
class ExperienceBuffer {
 public:
  explicit ExperienceBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("capacity must be positive");
  }

  void push(Experience e) {
    if (records_.size() < capacity_) {
      records_.push_back(std::move(e));
    } else {
      records_[cursor_] = std::move(e);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  size_t size() const { return records_.size(); }
  size_t capacity() const { return capacity_; }
  const Experience& at(size_t i) const { return records_[i]; }

  const Experience& sample(Rng& rng) const {
    return records_[rng.uniform_int(records_.size())];
  }

 private:
  size_t capacity_;
  size_t cursor_ = 0;
  std::vector<Experience> records_;
};

// Double-DQN target: action from the online net, value from the target net.
inline double compute_target(const Experience& e, const QFunction& online,
                             const QFunction& target, double gamma) {
  if (e.terminal) return e.reward;
  const auto q_online = online.forward(e.next_obs);
  int a_star = 0;
  for (int i = 1; i < static_cast<int>(q_online.size()); ++i) {
    if (q_online[i] > q_online[a_star]) a_star = i;
  }
  const auto q_target = target.forward(e.next_obs);
  return e.reward + gamma * q_target[a_star];
}

// Adam accumulators over the flat parameter vector.
struct OptimizerState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long step = 0;
  std::vector<double> m, v;

  void ensure_size(size_t n) {
    if (m.size() != n) {
      m.assign(n, 0.0);
      v.assign(n, 0.0);
    }
  }

  void apply(std::vector<double>& params, const std::vector<double>& grad) {
    ensure_size(params.size());
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      params[i] -= learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + epsilon);
    }
  }
};

// Mean-squared loss of a batch against fixed double-DQN targets, plus its
// gradient with respect to the online parameters.
inline double batch_loss_and_grad(QFunction& net, const QFunction& target,
                                  const std::vector<const Experience*>& batch,
                                  double gamma, std::vector<double>& grad) {
  grad.assign(net.param_count(), 0.0);
  const double k = static_cast<double>(batch.size());
  double loss = 0.0;
  for (const Experience* e : batch) {
    const double y = compute_target(*e, net, target, gamma);
    QFunction::Activation act;
    const auto q = net.forward(e->obs, &act);
    const double err = y - q[e->action];
    loss += err * err / k;
    net.backward(e->obs, act, e->action, -2.0 * err / k, grad);
  }
  return loss;
}

// One uniform-batch gradient step; returns the pre-update loss.
inline double train_step(QFunction& net, const QFunction& target,
                         const ExperienceBuffer& buf, OptimizerState& opt,
                         size_t batch_size, double gamma, Rng& rng) {
  if (buf.size() < batch_size) throw std::runtime_error("insufficient experience");
  std::vector<const Experience*> batch;
  batch.reserve(batch_size);
  for (size_t i = 0; i < batch_size; ++i) batch.push_back(&buf.sample(rng));
  std::vector<double> grad;
  const double loss = batch_loss_and_grad(net, target, batch, gamma, grad);
  opt.apply(net.params(), grad);
  return loss;
}

// Copies online parameters into the target every `period` steps.
inline void sync_target(const QFunction& net, QFunction& target,
                        long long step_counter, long long period) {
  if (period < 1) throw std::invalid_argument("sync period must be >= 1");
  if (step_counter % period == 0) target = net;
}

// Versioned binary checkpoint: network shape, parameters, optimizer state.
inline void save_checkpoint(const QFunction& net, const OptimizerState& opt,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  const char magic[8] = {'U', 'A', 'B', 'S', 'Q', 'N', 'T', '1'};
  out.write(magic, sizeof(magic));
  auto write_i64 = [&out](std::int64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  auto write_vec = [&out, &write_i64](const std::vector<double>& v) {
    write_i64(static_cast<std::int64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  write_i64(net.input_dim());
  write_i64(net.n_actions());
  write_i64(static_cast<std::int64_t>(net.trunk_widths().size()));
  for (int w : net.trunk_widths()) write_i64(w);
  write_i64(net.head_width());
  write_vec(net.params());
  write_i64(opt.step);
  out.write(reinterpret_cast<const char*>(&opt.learning_rate), sizeof(double));
  write_vec(opt.m);
  write_vec(opt.v);
}

inline void load_checkpoint(QFunction& net, OptimizerState& opt,
                            const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, "UABSQNT1", 8) != 0) {
    throw std::runtime_error("bad checkpoint magic: " + path);
  }
  auto read_i64 = [&in]() {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  auto read_vec = [&in, &read_i64](std::vector<double>& v) {
    v.resize(static_cast<size_t>(read_i64()));
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  const int input_dim = static_cast<int>(read_i64());
  const int n_actions = static_cast<int>(read_i64());
  std::vector<int> trunk(static_cast<size_t>(read_i64()));
  for (int& w : trunk) w = static_cast<int>(read_i64());
  const int head = static_cast<int>(read_i64());
  net = QFunction(input_dim, n_actions, trunk, head, 0);
  read_vec(net.params());
  opt.step = read_i64();
  in.read(reinterpret_cast<char*>(&opt.learning_rate), sizeof(double));
  read_vec(opt.m);
  read_vec(opt.v);
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
}

}  // namespace uabsim
