// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance --cli <path to uavmec> [--per-point] [--episodes N] [--realizations N]
//
// Criteria 7-10 train one DQN per seed at I_max = 2.5e5 and reuse it across the
// arrival grid unless --per-point is given (one model per grid point, roughly
// five times slower).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "selftest/checks.hpp"
#include "uavmec/config.hpp"
#include "uavmec/dqn.hpp"
#include "uavmec/experiment.hpp"

namespace fs = std::filesystem;
using namespace uavmec;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kHeadlineIMax = 2.5e5;
constexpr std::size_t kRequiredEpisodes = 200;
constexpr std::size_t kRequiredSeeds = 5;
constexpr double kMinImprovement = 1.10;
constexpr double kMinSpearman = 0.9;
constexpr double kOneSidedZ95 = 1.6448536269514722;

int failures = 0;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", passed ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!passed) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// ---------------------------------------------------------------------------

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void check_determinism(const std::string& cli) {
  const auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / "uavmec_acceptance_determinism";
  fs::remove_all(root);
  const std::string args =
      " sweep -q --seed 1 --override num_intervals=100 --override episodes=3"
      " --override batch_size=32 --override sweep_seeds=1,2 --override eval_realizations=5";
  std::string first, second;
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    const fs::path out = root / run;
    const std::string cmd = "\"" + cli + "\"" + args + " --out \"" + out.string() + "\" > /dev/null";
    ran = ran && std::system(cmd.c_str()) == 0;
    (run[0] == 'a' ? first : second) = read_file(out / "sweep.csv");
  }
  const bool same = ran && !first.empty() && first == second;
  report(6, "determinism", same,
         fmt("two sweep runs %s (%zu bytes, %.1f s)", same ? "byte-identical" : "differ or failed",
             first.size(), seconds_since(start)));
  fs::remove_all(root);
}

// ---------------------------------------------------------------------------

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return (sxx == 0 || syy == 0) ? 0.0 : sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

struct Slope {
  double slope = 0;
  double se = 0;
};

Slope ols_slope(const std::vector<double>& y) {
  const double n = double(y.size());
  double mx = (n - 1) / 2, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += (double(i) - mx) * (y[i] - my);
    sxx += (double(i) - mx) * (double(i) - mx);
  }
  const double b = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (my + b * (double(i) - mx));
    rss += e * e;
  }
  return {b, std::sqrt(rss / (n - 2) / sxx)};
}

// Per-interval backlog of the greedy DQN policy, averaged over devices and
// realizations.
std::vector<QueueTriple> dqn_backlog_path(const SimConfig& config, const QNetwork& net,
                                          std::uint64_t seed, std::size_t realizations) {
  std::vector<QueueTriple> path(config.num_intervals);
  Environment prototype(config, seed);
  std::unordered_map<std::string, std::size_t> memo;
  const double scale = 1.0 / double(realizations * config.num_devices);
  for (std::size_t r = 0; r < realizations; ++r) {
    Environment env = prototype;
    Observation obs = env.reset(evaluation_episode_seed(seed, r));
    while (!env.done()) {
      const auto x = obs.normalized();
      std::string key(reinterpret_cast<const char*>(x.data()), x.size() * sizeof(double));
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, argmax(net.forward(x))).first;
      const auto t = env.step(it->second);
      auto& p = path[t.interval.interval];
      for (const auto& d : t.interval.devices) {
        p.local += d.queues.local * scale;
        p.uav += d.queues.uav * scale;
        p.cloud += d.queues.cloud * scale;
      }
      obs = t.next_observation;
    }
  }
  return path;
}

struct Experiment {
  std::vector<ResultRow> rows;
  std::map<std::uint64_t, QNetwork> models;  // models used at the headline point
};

double mean_of(const std::vector<ResultRow>& rows, PolicyKind p, double i_max,
               double ResultRow::*field) {
  double sum = 0;
  int n = 0;
  for (const auto& r : rows)
    if (r.policy == p && r.i_max == i_max) {
      sum += r.*field;
      ++n;
    }
  return n ? sum / n : std::nan("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cli;
  bool per_point = false;
  std::size_t episodes = kRequiredEpisodes;
  std::size_t realizations = 1000;
  std::size_t stability_realizations = 100;
  std::string csv_out = "acceptance_sweep.csv";
  app.add_option("--cli", cli, "path to the uavmec executable")->required();
  app.add_flag("--per-point", per_point, "train a separate DQN at every grid point");
  app.add_option("--episodes", episodes, "training episodes per model");
  app.add_option("--realizations", realizations, "evaluation episodes per row");
  app.add_option("--stability-realizations", stability_realizations, "episodes for criterion 10");
  app.add_option("--csv", csv_out, "where to write the sweep rows");
  CLI11_PARSE(app, argc, argv);

  const auto t0 = Clock::now();
  const std::uint64_t check_seed = 20240601;

  {
    const auto r = selftest::check_queue_oracle(check_seed, 1000);
    report(1, "queue dynamics oracle", r.passed, r.detail);
  }
  {
    const auto r = selftest::check_reward_oracle(check_seed, 100);
    report(2, "reward oracle", r.passed, r.detail);
  }
  {
    const auto r = selftest::check_channel_statistics(check_seed, 100000);
    report(3, "channel statistics", r.passed, r.detail);
  }
  {
    const auto r = selftest::check_gradient(check_seed, 10);
    report(4, "gradient check", r.passed, r.detail);
  }
  {
    const auto r = selftest::check_queue_fuzz(check_seed, 100000);
    report(5, "queue safety fuzz", r.passed, r.detail);
  }
  check_determinism(cli);

  // Default-parameter experiment.
  SimConfig config;
  config.train.episodes = episodes;
  SweepSpec spec;
  spec.seeds = {1, 2, 3, 4, 5};
  spec.realizations = realizations;
  spec.shared_model = !per_point;
  config.sweep = spec;

  const auto t_sweep = Clock::now();
  Experiment ex;
  const ModelProvider provider = [&](const SimConfig& point, std::uint64_t seed) {
    const auto start = Clock::now();
    QNetwork net = train_model(point, seed);
    std::fprintf(stderr, "trained i_max=%g seed=%llu in %.1f s\n", point.i_max,
                 static_cast<unsigned long long>(seed), seconds_since(start));
    if (point.i_max == kHeadlineIMax) {
#pragma omp critical
      ex.models[seed] = net;
    }
    return net;
  };
  ex.rows = run_sweep(spec, config, provider);
  emit_csv(ex.rows, csv_out);
  const double sweep_seconds = seconds_since(t_sweep);
  std::fprintf(stderr, "sweep finished in %.1f s, rows in %s\n", sweep_seconds, csv_out.c_str());

  const bool scale_ok = episodes >= kRequiredEpisodes && spec.seeds.size() >= kRequiredSeeds;
  const std::string scale = fmt("%zu seeds, %zu episodes, %zu realizations, %s model, sweep %.0f s",
                                spec.seeds.size(), episodes, realizations,
                                per_point ? "per-point" : "shared", sweep_seconds);

  const auto pde = [&](PolicyKind p, double i) { return mean_of(ex.rows, p, i, &ResultRow::mean_pde); };
  const auto cd = [&](PolicyKind p, double i) { return mean_of(ex.rows, p, i, &ResultRow::mean_cd); };
  using P = PolicyKind;

  // 7: PDE ordering at the headline arrival rate.
  {
    const double dqn = pde(P::dqn, kHeadlineIMax), cloud = pde(P::cloud_heavy, kHeadlineIMax),
                 rnd = pde(P::random, kHeadlineIMax), uav = pde(P::uav_heavy, kHeadlineIMax);
    const double best = std::max({cloud, rnd, uav});
    const double ratio = dqn / best;
    const bool order = dqn > cloud && cloud > rnd && rnd > uav;
    report(7, "PDE ordering DQN > Cloud > Random > UAV", scale_ok && order && ratio >= kMinImprovement,
           fmt("PDE dqn=%.6g cloud=%.6g random=%.6g uav=%.6g; ordering %s; dqn/best baseline = %.4f "
               "(need >= %.2f); %s",
               dqn, cloud, rnd, uav, order ? "holds" : "violated", ratio, kMinImprovement,
               scale.c_str()));
  }

  // 8: CD ordering.
  {
    const double dqn = cd(P::dqn, kHeadlineIMax), cloud = cd(P::cloud_heavy, kHeadlineIMax),
                 rnd = cd(P::random, kHeadlineIMax), uav = cd(P::uav_heavy, kHeadlineIMax);
    const bool order = uav < dqn && dqn < rnd && rnd < cloud;
    report(8, "CD ordering UAV < DQN < Random < Cloud", scale_ok && order,
           fmt("CD dqn=%.6g cloud=%.6g random=%.6g uav=%.6g s/interval; ordering %s", dqn, cloud,
               rnd, uav, order ? "holds" : "violated"));
  }

  // 9: monotone trends over the grid.
  {
    bool ok = true;
    std::string detail;
    for (auto p : {P::cloud_heavy, P::dqn, P::random, P::uav_heavy}) {
      std::vector<double> grid, y_pde, y_cd;
      for (double i : spec.i_max_values) {
        grid.push_back(i);
        y_pde.push_back(pde(p, i));
        y_cd.push_back(cd(p, i));
      }
      const double rp = spearman(grid, y_pde), rc = spearman(grid, y_cd);
      ok = ok && rp > kMinSpearman && rc > kMinSpearman;
      detail += fmt("%s rho(PDE)=%.3f rho(CD)=%.3f; ", to_string(p).c_str(), rp, rc);
    }
    detail += fmt("need > %.1f", kMinSpearman);
    report(9, "PDE and CD increase with arrival rate", ok, detail);
  }

  // 10: backlog stability of the DQN policy at the defaults.
  {
    const auto start = Clock::now();
    std::vector<QueueTriple> pooled(config.num_intervals);
    for (const auto& [seed, net] : ex.models) {
      const auto path = dqn_backlog_path(config, net, seed, stability_realizations);
      for (std::size_t n = 0; n < path.size(); ++n) {
        pooled[n].local += path[n].local / double(ex.models.size());
        pooled[n].uav += path[n].uav / double(ex.models.size());
        pooled[n].cloud += path[n].cloud / double(ex.models.size());
      }
    }
    const std::size_t tail_start = config.num_intervals - config.num_intervals / 5;
    const std::vector<QueueTriple> tail(pooled.begin() + long(tail_start), pooled.end());
    const QueueTriple tail_mean = running_mean_backlog(tail);
    bool ok = !ex.models.empty();
    std::string detail;
    const char* names[] = {"local", "uav", "cloud"};
    for (int q = 0; q < 3; ++q) {
      std::vector<double> y;
      for (const auto& t : tail) y.push_back(q == 0 ? t.local : q == 1 ? t.uav : t.cloud);
      const Slope s = ols_slope(y);
      const bool bounded = s.slope - kOneSidedZ95 * s.se <= 0.0 && std::isfinite(s.slope);
      ok = ok && bounded;
      const double mean = q == 0 ? tail_mean.local : q == 1 ? tail_mean.uav : tail_mean.cloud;
      detail += fmt("%s mean=%.6g slope=%.3g+-%.2g bits/interval; ", names[q], mean, s.slope, s.se);
    }
    detail += fmt("last %zu intervals, %zu models x %zu episodes, %.1f s", tail.size(),
                  ex.models.size(), stability_realizations, seconds_since(start));
    report(10, "DQN backlog stability", ok, detail);
  }

  std::printf("total runtime %.1f s; %d criteria failed\n", seconds_since(t0), failures);
  return failures == 0 ? 0 : 1;
}
