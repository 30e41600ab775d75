#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "uabsim/learner.hpp"
#include "uabsim/rng.hpp"

using namespace uabsim;

namespace {

// Zeroes every parameter, then locates (by probing) the output biases of the
// value and advantage heads and sets them so the network computes exactly the
// requested Q vector on any input.
void set_q(QFunction& net, const std::vector<double>& q) {
  REQUIRE(static_cast<int>(q.size()) == net.n_actions());
  auto& p = net.params();
  std::fill(p.begin(), p.end(), 0.0);
  const std::vector<double> zero_obs(net.input_dim(), 0.0);
  const int A = net.n_actions();
  int value_idx = -1;
  std::vector<int> adv_idx(A, -1);
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = 1.0;
    const auto out = net.forward(zero_obs);
    p[i] = 0.0;
    bool all_one = true;
    for (double v : out) all_one = all_one && std::abs(v - 1.0) < 1e-12;
    if (all_one) {
      if (value_idx < 0) value_idx = static_cast<int>(i);
      continue;
    }
    for (int j = 0; j < A; ++j) {
      bool matches = true;
      for (int k = 0; k < A; ++k) {
        const double expect = (k == j ? 1.0 : 0.0) - 1.0 / A;
        matches = matches && std::abs(out[k] - expect) < 1e-12;
      }
      if (matches && adv_idx[j] < 0) adv_idx[j] = static_cast<int>(i);
    }
  }
  REQUIRE(value_idx >= 0);
  for (int j = 0; j < A; ++j) REQUIRE(adv_idx[j] >= 0);
  double mean = 0.0;
  for (double v : q) mean += v / A;
  p[value_idx] = mean;
  for (int j = 0; j < A; ++j) p[adv_idx[j]] = q[j] - mean;
}

Experience make_exp(Rng& rng, int input_dim, int n_actions, bool terminal) {
  Experience e;
  e.obs.resize(input_dim);
  e.next_obs.resize(input_dim);
  for (auto& v : e.obs) v = rng.uniform(-1.0, 1.0);
  for (auto& v : e.next_obs) v = rng.uniform(-1.0, 1.0);
  e.action = static_cast<int>(rng.uniform_int(n_actions));
  e.reward = rng.uniform(-1.0, 1.0);
  e.terminal = terminal;
  return e;
}

}  // namespace

TEST_CASE("network initialization is seeded and shaped") {
  QFunction a(6, 4, {16, 16}, 8, 42);
  QFunction b(6, 4, {16, 16}, 8, 42);
  QFunction c(6, 4, {16, 16}, 8, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.input_dim() == 6);
  CHECK(a.n_actions() == 4);
  const std::vector<double> obs(6, 0.25);
  const auto q = a.forward(obs);
  REQUIRE(q.size() == 4);
  for (double v : q) CHECK(std::isfinite(v));
}

TEST_CASE("dueling aggregation identity holds on live activations") {
  QFunction net(5, 3, {8}, 6, 7);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> obs(5);
    for (auto& v : obs) v = rng.uniform(-2.0, 2.0);
    QFunction::Activation act;
    const auto q = net.forward(obs, &act);
    double mean_adv = 0.0;
    for (double a : act.advantages) mean_adv += a / act.advantages.size();
    for (int j = 0; j < 3; ++j) {
      CHECK(q[j] ==
            Catch::Approx(act.value + act.advantages[j] - mean_adv).margin(1e-12));
    }
  }
}

TEST_CASE("forcing exact Q values through the heads") {
  QFunction net(3, 3, {4}, 4, 11);
  set_q(net, {2.0, 4.0, 9.0});
  const auto q = net.forward({0.3, -0.1, 0.7});
  CHECK(q[0] == Catch::Approx(2.0).margin(1e-9));
  CHECK(q[1] == Catch::Approx(4.0).margin(1e-9));
  CHECK(q[2] == Catch::Approx(9.0).margin(1e-9));
}

TEST_CASE("greedy action breaks ties toward the lowest index") {
  QFunction net(3, 3, {4}, 4, 11);
  set_q(net, {5.0, 5.0, 5.0});
  CHECK(greedy_action(net, {0.0, 0.0, 0.0}) == 0);
  set_q(net, {1.0, 7.0, 7.0});
  CHECK(greedy_action(net, {0.5, 0.5, 0.5}) == 1);
}

TEST_CASE("double-DQN target reference value") {
  QFunction online(2, 2, {4}, 4, 1);
  QFunction target(2, 2, {4}, 4, 2);
  set_q(online, {0.5, 2.0});
  set_q(target, {1.0, 0.3});
  Experience e;
  e.obs = {0.0, 0.0};
  e.next_obs = {0.1, 0.2};
  e.action = 0;
  e.reward = 1.0;
  e.terminal = false;
  CHECK(compute_target(e, online, target, 0.99) ==
        Catch::Approx(1.297).margin(1e-9));
  // Terminal transitions ignore the bootstrap entirely.
  e.terminal = true;
  CHECK(compute_target(e, online, target, 0.99) == Catch::Approx(1.0));
  // gamma = 0 reduces to the reward.
  e.terminal = false;
  CHECK(compute_target(e, online, target, 0.0) == Catch::Approx(1.0));
}

TEST_CASE("experience buffer is FIFO with uniform sampling") {
  ExperienceBuffer buf(3);
  CHECK_THROWS(ExperienceBuffer(0));
  for (int i = 0; i < 4; ++i) {
    Experience e;
    e.reward = static_cast<double>(i);
    buf.push(std::move(e));
  }
  REQUIRE(buf.size() == 3);
  // Oldest record (reward 0) was evicted in favor of reward 3.
  std::vector<double> rewards;
  for (size_t i = 0; i < buf.size(); ++i) rewards.push_back(buf.at(i).reward);
  std::sort(rewards.begin(), rewards.end());
  CHECK(rewards == std::vector<double>{1.0, 2.0, 3.0});

  Rng rng(5);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 30000; ++i) {
    counts[static_cast<int>(buf.sample(rng).reward)]++;
  }
  CHECK(counts[0] == 0);
  for (int r = 1; r <= 3; ++r) {
    CHECK(counts[r] > 9000);
    CHECK(counts[r] < 11000);
  }
}

TEST_CASE("finite differences confirm the analytic gradient") {
  QFunction net(4, 4, {8}, 4, 99);
  QFunction target(4, 4, {8}, 4, 100);
  Rng rng(17);
  std::vector<Experience> pool;
  std::vector<const Experience*> batch;
  // Terminal transitions keep the loss smooth in the parameters: the
  // bootstrap target would otherwise jump when a perturbation flips the
  // online argmax between near-tied actions.
  for (int i = 0; i < 8; ++i) {
    pool.push_back(make_exp(rng, 4, 4, true));
  }
  for (const auto& e : pool) batch.push_back(&e);

  std::vector<double> grad;
  batch_loss_and_grad(net, target, batch, 0.95, grad);
  REQUIRE(grad.size() == net.params().size());

  const double h = 1e-6;
  std::vector<double> scratch;
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const size_t i = rng.uniform_int(net.params().size());
    const double orig = net.params()[i];
    net.params()[i] = orig + h;
    const double lp = batch_loss_and_grad(net, target, batch, 0.95, scratch);
    net.params()[i] = orig - h;
    const double lm = batch_loss_and_grad(net, target, batch, 0.95, scratch);
    net.params()[i] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1.0});
    worst = std::max(worst, std::abs(fd - grad[i]) / denom);
    ++checked;
  }
  CHECK(checked == 20);
  CHECK(worst < 1e-4);
}

TEST_CASE("training requires a full batch and reduces loss on one record") {
  QFunction net(3, 2, {8}, 4, 21);
  QFunction target = net;
  ExperienceBuffer buf(16);
  OptimizerState opt;
  opt.learning_rate = 1e-2;
  Rng rng(9);
  CHECK_THROWS_WITH(train_step(net, target, buf, opt, 4, 0.9, rng),
                    Catch::Matchers::ContainsSubstring("insufficient experience"));

  Experience e;
  e.obs = {0.2, -0.4, 0.9};
  e.next_obs = {0.0, 0.0, 0.0};
  e.action = 1;
  e.reward = 1.0;
  e.terminal = true;
  buf.push(e);

  double loss = 0.0;
  for (int i = 0; i < 500; ++i) {
    loss = train_step(net, target, buf, opt, 1, 0.9, rng);
    if (loss < 1e-3) break;
  }
  CHECK(loss < 1e-3);
  CHECK(net.forward(e.obs)[1] == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("training the online network leaves the target untouched") {
  QFunction net(3, 2, {8}, 4, 33);
  QFunction target = net;
  const QFunction target_before = target;
  ExperienceBuffer buf(8);
  OptimizerState opt;
  Rng rng(2);
  for (int i = 0; i < 8; ++i) buf.push(make_exp(rng, 3, 2, false));
  for (int i = 0; i < 10; ++i) train_step(net, target, buf, opt, 4, 0.9, rng);
  CHECK(target == target_before);
  CHECK_FALSE(net == target_before);
}

TEST_CASE("target synchronization obeys its period") {
  QFunction net(3, 2, {4}, 4, 1);
  QFunction target(3, 2, {4}, 4, 2);
  const QFunction stale = target;

  CHECK_THROWS(sync_target(net, target, 0, 0));

  sync_target(net, target, 1, 100);
  CHECK(target == stale);
  sync_target(net, target, 99, 100);
  CHECK(target == stale);
  sync_target(net, target, 100, 100);
  CHECK(target == net);

  QFunction target2(3, 2, {4}, 4, 3);
  sync_target(net, target2, 1, 1);
  CHECK(target2 == net);
}

TEST_CASE("checkpoint round trip restores network and optimizer") {
  QFunction net(5, 3, {8, 8}, 6, 64);
  QFunction target = net;
  ExperienceBuffer buf(8);
  OptimizerState opt;
  Rng rng(12);
  for (int i = 0; i < 8; ++i) buf.push(make_exp(rng, 5, 3, false));
  for (int i = 0; i < 5; ++i) train_step(net, target, buf, opt, 4, 0.9, rng);

  const std::string path =
      (std::filesystem::temp_directory_path() / "uabsim_ckpt_test.qnt").string();
  save_checkpoint(net, opt, path);

  QFunction restored;
  OptimizerState ropt;
  load_checkpoint(restored, ropt, path);
  CHECK(restored == net);
  CHECK(ropt.step == opt.step);
  CHECK(ropt.m == opt.m);
  CHECK(ropt.v == opt.v);
  CHECK(ropt.learning_rate == opt.learning_rate);

  // Restored network keeps producing identical outputs.
  std::vector<double> obs = {0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(restored.forward(obs) == net.forward(obs));
  std::filesystem::remove(path);
}

TEST_CASE("uniform integer draws pass a chi-square uniformity screen") {
  Rng rng(20260826);
  const int buckets = 20;
  const int draws = 100000;
  std::vector<int> counts(buckets, 0);
  for (int i = 0; i < draws; ++i) counts[rng.uniform_int(buckets)]++;
  const double expected = static_cast<double>(draws) / buckets;
  double chi2 = 0.0;
  for (int c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  // Critical value for 19 degrees of freedom at the 1% level.
  CHECK(chi2 < 36.191);
}
