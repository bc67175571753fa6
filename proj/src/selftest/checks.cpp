#include "selftest/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <random>

#include "selftest/oracles.hpp"
#include "uavmec/channel.hpp"
#include "uavmec/config.hpp"
#include "uavmec/dqn.hpp"
#include "uavmec/environment.hpp"
#include "uavmec/objective.hpp"
#include "uavmec/qnetwork.hpp"
#include "uavmec/queueing.hpp"
#include "uavmec/rng.hpp"

namespace uavmec::selftest {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double relative_error(double got, double want, double floor) {
  return std::abs(got - want) / std::max({std::abs(got), std::abs(want), floor});
}

bool same_bits(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

// Backlogs spanning empty queues, tiny values and very large ones.
double draw_backlog(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (pick(rng)) {
    case 0: return 0.0;
    case 1: return unit(rng);
    case 2: return std::floor(unit(rng) * 1e4);
    default: return std::pow(10.0, 9.0 * unit(rng));
  }
}

// Mostly continuous fractions, with the endpoints and catalog levels mixed in.
double draw_fraction(Rng& rng) {
  static constexpr double kSpecial[] = {0.0, 1.0, 0.3, 0.6};
  std::uniform_int_distribution<int> pick(0, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = pick(rng);
  return k < 4 ? kSpecial[k] : unit(rng);
}

}  // namespace

CheckResult check_queue_oracle(std::uint64_t seed, std::size_t instances) {
  const auto start = Clock::now();
  Rng rng = make_stream(seed, StreamTag::training, 101);
  std::uniform_real_distribution<double> arrival(0.0, 2.5e5);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    oracle::QueueCase c{draw_backlog(rng),   draw_backlog(rng),   draw_backlog(rng),
                        draw_fraction(rng),  draw_fraction(rng),  draw_fraction(rng),
                        draw_fraction(rng),  draw_fraction(rng),  arrival(rng)};
    const auto want = oracle::queue_step(c);
    const QueueTriple q{c.ql, c.qu, c.qc};
    const auto s = compute_splits(q, c.x_uav, c.x_cloud, c.w_local, c.w_uav, c.w_cloud);
    const auto next = update_queues(q, s, c.arrival);
    const bool ok = same_bits(s.d_uav, want.d_uav) && same_bits(s.b_local, want.b_local) &&
                    same_bits(s.d_cloud, want.d_cloud) && same_bits(s.b_uav, want.b_uav) &&
                    same_bits(s.b_cloud, want.b_cloud) && same_bits(next.local, want.next_ql) &&
                    same_bits(next.uav, want.next_qu) && same_bits(next.cloud, want.next_qc);
    if (!ok) ++mismatches;
  }
  CheckResult r{"queue dynamics oracle", false, "", seconds_since(start)};
  r.passed = mismatches == 0 && r.seconds < 1.0;
  r.detail = format("%zu/%zu instances identical, %.3f s (limit 1 s)", instances - mismatches,
                    instances, r.seconds);
  return r;
}

CheckResult check_reward_oracle(std::uint64_t seed, std::size_t instances) {
  const auto start = Clock::now();
  Rng rng = make_stream(seed, StreamTag::training, 102);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> history_len(0, 6);
  constexpr double kTol = 1e-9;

  double worst_reward = 0.0;
  double worst_dpp = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const QueueTriple q{draw_backlog(rng), draw_backlog(rng), draw_backlog(rng)};
    const auto s = compute_splits(q, draw_fraction(rng), draw_fraction(rng), draw_fraction(rng),
                                  draw_fraction(rng), draw_fraction(rng));
    const double comm = 0.25 + 5.0 * unit(rng);

    // Earlier intervals for a single device; some histories are empty.
    PdeAccumulator acc(1);
    double bits = 0.0;
    double delay = 0.0;
    const int len = history_len(rng);
    for (int m = 0; m < len; ++m) {
      const double b = 1e5 * unit(rng);
      const double t = unit(rng) < 0.2 ? 0.0 : 0.25 + 3.0 * unit(rng);
      acc.record(std::span<const double>(&b, 1), std::span<const double>(&t, 1));
      bits += b;
      delay += t;
    }

    RewardWeights w;
    w.v1 = std::pow(10.0, -8.0 + 8.0 * unit(rng));
    w.v2 = std::pow(10.0, -8.0 + 8.0 * unit(rng));
    w.v3 = std::pow(10.0, -8.0 + 8.0 * unit(rng));
    w.v4 = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    const bool met = unit(rng) < 0.7;

    oracle::RewardCase c{q.local,   q.uav,   q.cloud, s.d_uav, s.b_local, s.d_cloud, s.b_uav,
                         s.b_cloud, comm,    bits,    delay,   w.v1,      w.v2,      w.v3,
                         w.v4,      met};
    const double got = reward(q, s, comm, acc, 0, w, met);
    const double want = oracle::reward(c);
    worst_reward = std::max(worst_reward, relative_error(got, want, 1e-300));

    // With v1 = v2 = v3 = 1 and v4 = V the per-device reward is the
    // single-device drift-plus-penalty value.
    RewardWeights unit_w;
    unit_w.v1 = unit_w.v2 = unit_w.v3 = 1.0;
    unit_w.lyapunov_v = w.v4;
    unit_w.v4 = w.v4;
    const double as_reward = reward(q, s, comm, acc, 0, unit_w, true);
    const double as_dpp = drift_plus_penalty_value(std::span<const QueueTriple>(&q, 1),
                                                   std::span<const SplitAmounts>(&s, 1),
                                                   std::span<const double>(&comm, 1), acc,
                                                   unit_w, acc.intervals());
    c.v1 = c.v2 = c.v3 = 1.0;
    const double utility = delay > 0.0 ? bits / delay : 0.0;
    const double oracle_dpp = oracle::drift_plus_penalty_single(c, utility, w.v4);
    worst_dpp = std::max({worst_dpp, relative_error(as_reward, as_dpp, 1e-300),
                          relative_error(as_dpp, oracle_dpp, 1e-300)});
  }
  CheckResult r{"reward oracle", false, "", seconds_since(start)};
  r.passed = worst_reward <= kTol && worst_dpp <= kTol;
  r.detail = format("max rel err reward %.3g, reward vs drift-plus-penalty %.3g (limit %.0e)",
                    worst_reward, worst_dpp, kTol);
  return r;
}

CheckResult check_channel_statistics(std::uint64_t seed, std::size_t samples) {
  const auto start = Clock::now();
  Rng rng = make_stream(seed, StreamTag::channel, 103);
  double power = 0.0;
  for (std::size_t i = 0; i < samples; ++i) power += std::norm(rician_sample(rng, 10.0));
  const double mean_power = power / static_cast<double>(samples);

  constexpr double kLargeK = 1e14;
  double worst_los = 0.0;
  for (std::size_t i = 0; i < samples; ++i)
    worst_los = std::max(worst_los, std::abs(std::abs(rician_sample(rng, kLargeK)) - 1.0));
  const double pure =
      std::abs(std::abs(rician_sample(rng, std::numeric_limits<double>::infinity())) - 1.0);

  CheckResult r{"channel statistics", false, "", seconds_since(start)};
  r.passed = mean_power >= 0.99 && mean_power <= 1.01 && worst_los <= 1e-6 && pure == 0.0 &&
             r.seconds < 5.0;
  r.detail = format("E|rho|^2 = %.5f at K=10, max ||rho|-1| = %.2g at K=1e14, %.3f s",
                    mean_power, worst_los, r.seconds);
  return r;
}

CheckResult check_gradient(std::uint64_t seed, std::size_t networks) {
  const auto start = Clock::now();
  Rng rng = make_stream(seed, StreamTag::training, 104);
  std::uniform_int_distribution<std::size_t> width(2, 7);
  std::uniform_int_distribution<std::size_t> depth(1, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr double kStep = 1e-4;
  constexpr double kFloor = 1e-8;

  double worst = 0.0;
  double worst_loss = 0.0;
  for (std::size_t n = 0; n < networks; ++n) {
    std::vector<std::size_t> sizes{width(rng)};
    const std::size_t hidden = depth(rng);
    for (std::size_t l = 0; l < hidden; ++l) sizes.push_back(width(rng) + 2);
    sizes.push_back(width(rng) + 1);
    QNetwork net = QNetwork::random(sizes, rng);
    for (auto& layer : net.layers())
      for (auto& b : layer.bias) b = 0.1 * normal(rng);

    const std::size_t batch = 3 + n % 4;
    std::vector<double> inputs(batch * sizes.front());
    for (auto& v : inputs) v = normal(rng);
    std::vector<std::size_t> actions(batch);
    std::uniform_int_distribution<std::size_t> action(0, sizes.back() - 1);
    for (auto& a : actions) a = action(rng);
    std::vector<double> targets(batch);
    for (auto& t : targets) t = normal(rng);

    Gradients grad(net);
    const double loss = loss_and_gradient(net, inputs, actions, targets, grad);

    oracle::Mlp mlp;
    for (const auto& layer : net.layers()) {
      std::vector<std::vector<double>> w(layer.out_dim, std::vector<double>(layer.in_dim));
      for (std::size_t o = 0; o < layer.out_dim; ++o)
        for (std::size_t i = 0; i < layer.in_dim; ++i) w[o][i] = layer.weights[o * layer.in_dim + i];
      mlp.w.push_back(std::move(w));
      mlp.b.push_back(layer.bias);
    }
    std::vector<std::vector<double>> rows(batch);
    for (std::size_t b = 0; b < batch; ++b)
      rows[b].assign(inputs.begin() + b * sizes.front(), inputs.begin() + (b + 1) * sizes.front());
    worst_loss = std::max(worst_loss, relative_error(loss, oracle::mlp_loss(mlp, rows, actions, targets), kFloor));

    auto central = [&](double& param) {
      const double saved = param;
      param = saved + kStep;
      const double up = oracle::mlp_loss(mlp, rows, actions, targets);
      param = saved - kStep;
      const double down = oracle::mlp_loss(mlp, rows, actions, targets);
      param = saved;
      return (up - down) / (2.0 * kStep);
    };
    for (std::size_t l = 0; l < mlp.w.size(); ++l) {
      const std::size_t in_dim = mlp.w[l].front().size();
      for (std::size_t o = 0; o < mlp.w[l].size(); ++o) {
        for (std::size_t i = 0; i < in_dim; ++i)
          worst = std::max(worst, relative_error(grad.weights[l][o * in_dim + i],
                                                 central(mlp.w[l][o][i]), kFloor));
        worst = std::max(worst, relative_error(grad.bias[l][o], central(mlp.b[l][o]), kFloor));
      }
    }
  }
  CheckResult r{"gradient check", false, "", seconds_since(start)};
  r.passed = worst < 1e-4 && worst_loss < 1e-12 && r.seconds < 10.0;
  r.detail = format("max rel err %.3g over %zu nets (limit 1e-4), loss rel err %.2g, %.3f s",
                    worst, networks, worst_loss, r.seconds);
  return r;
}

CheckResult check_queue_fuzz(std::uint64_t seed, std::size_t steps) {
  const auto start = Clock::now();
  Rng rng = make_stream(seed, StreamTag::arrival, 105);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t negatives = 0;
  std::size_t clamps = 0;
  double lowest_raw = std::numeric_limits<double>::infinity();

  auto inspect = [&](const QueueTriple& q, const SplitAmounts& s, const QueueTriple& next) {
    const double raw[] = {q.local - s.d_uav - s.b_local, q.uav - s.d_cloud - s.b_uav,
                          q.cloud - s.b_cloud};
    for (double v : raw) {
      lowest_raw = std::min(lowest_raw, v);
      if (v < 0.0) ++clamps;
    }
    if (next.local < 0.0 || next.uav < 0.0 || next.cloud < 0.0) ++negatives;
  };

  // Bare queue triple driven by continuous fractions.
  QueueTriple q;
  const std::size_t bare = steps / 2;
  for (std::size_t i = 0; i < bare; ++i) {
    const auto s = compute_splits(q, unit(rng), unit(rng), unit(rng), unit(rng), unit(rng));
    const auto next = update_queues(q, s, 2.5e5 * unit(rng));
    inspect(q, s, next);
    q = next;
  }

  // The environment under uniformly random catalog actions.
  SimConfig config;
  config.num_intervals = 1000;
  Environment env(config, seed);
  std::uniform_int_distribution<std::size_t> action(0, env.catalog().size() - 1);
  std::size_t episode = 0;
  env.reset(training_episode_seed(seed, episode));
  for (std::size_t i = bare; i < steps; ++i) {
    if (env.done()) env.reset(training_episode_seed(seed, ++episode));
    const auto t = env.step(action(rng));
    for (std::size_t k = 0; k < t.interval.devices.size(); ++k) {
      const auto& d = t.interval.devices[k];
      inspect(d.queues, d.splits, env.state().queues[k]);
    }
  }

  CheckResult r{"queue safety fuzz", false, "", seconds_since(start)};
  r.passed = negatives == 0 && clamps == 0 && r.seconds < 10.0;
  r.detail = format("%zu steps: %zu negative queues, %zu active clamps, min pre-clamp %.3g, %.3f s",
                    steps, negatives, clamps, lowest_raw, r.seconds);
  return r;
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
  return {check_queue_oracle(seed), check_reward_oracle(seed), check_channel_statistics(seed),
          check_gradient(seed), check_queue_fuzz(seed)};
}

}  // namespace uavmec::selftest
