#include "uavmec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "uavmec/baselines.hpp"
#include "uavmec/dqn.hpp"
#include "uavmec/objective.hpp"

namespace uavmec {
namespace {

struct EpisodeTotals {
  PdeAccumulator accumulator;
  double sum_ql = 0.0;
  double sum_qu = 0.0;
  double sum_qc = 0.0;
  std::size_t violations = 0;
  double terminal_distance = 0.0;
};

/// Greedy DQN actions memoised per observation; the network is frozen.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(const QNetwork& net) : net_(net) {}

  std::size_t act(const Observation& obs) {
    const auto x = obs.normalized();
    std::string key(reinterpret_cast<const char*>(x.data()), x.size() * sizeof(double));
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const std::size_t a = argmax(net_.forward(x));
    memo_.emplace(std::move(key), a);
    return a;
  }

 private:
  const QNetwork& net_;
  std::unordered_map<std::string, std::size_t> memo_;
};

EpisodeTotals run_episode(const Environment& prototype, PolicyKind policy, std::uint64_t seed,
                          std::size_t realization, const QNetwork* model,
                          const TrajectorySink* sink) {
  Environment env = prototype;
  Observation obs = env.reset(evaluation_episode_seed(seed, realization));
  Rng policy_rng = make_stream(seed, StreamTag::policy, realization);
  std::optional<GreedyPolicy> greedy;
  if (policy == PolicyKind::dqn) greedy.emplace(*model);

  EpisodeTotals totals;
  while (!env.done()) {
    const std::size_t action = greedy ? greedy->act(obs)
                                      : baseline_action(policy, env.config(), policy_rng);
    TransitionRecord tr = env.step(action);
    for (const auto& d : tr.interval.devices) {
      totals.sum_ql += d.queues.local;
      totals.sum_qu += d.queues.uav;
      totals.sum_qc += d.queues.cloud;
      if (!d.deadline_met) ++totals.violations;
    }
    if (sink && *sink) (*sink)(tr.interval);
    obs = std::move(tr.next_observation);
  }
  totals.accumulator = env.state().accumulator;
  totals.terminal_distance = horizontal_distance(env.state().uav, env.config().area_center());
  return totals;
}

}  // namespace

ResultRow run_eval(PolicyKind policy, const SimConfig& config, std::uint64_t seed,
                   std::size_t realizations, const QNetwork* model, const TrajectorySink& sink,
                   ExecutionMode mode) {
  if (realizations == 0) throw std::invalid_argument("run_eval: realizations must be positive");
  if (policy == PolicyKind::dqn && model == nullptr)
    throw std::invalid_argument("run_eval: the dqn policy requires a trained model");

  const Environment prototype(config, seed);
  if (model && policy == PolicyKind::dqn &&
      (model->input_size() != prototype.observation_size() ||
       model->output_size() != prototype.catalog().size()))
    throw std::invalid_argument("run_eval: model shape does not match the environment");

  std::vector<EpisodeTotals> episodes(realizations);
  std::vector<std::exception_ptr> errors(realizations);
  const auto run_one = [&](std::size_t r) {
    try {
      episodes[r] = run_episode(prototype, policy, seed, r, model, r == 0 ? &sink : nullptr);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  if (mode == ExecutionMode::parallel) {
    const auto n = static_cast<std::int64_t>(realizations);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t r = 0; r < n; ++r) run_one(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < realizations; ++r) run_one(r);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Ordered reduction keeps the result independent of the schedule.
  PdeAccumulator pooled(config.num_devices);
  double ql = 0.0, qu = 0.0, qc = 0.0, terminal = 0.0;
  std::size_t violations = 0;
  for (const auto& ep : episodes) {
    pooled.merge(ep.accumulator);
    ql += ep.sum_ql;
    qu += ep.sum_qu;
    qc += ep.sum_qc;
    violations += ep.violations;
    terminal += ep.terminal_distance;
  }

  const double intervals = static_cast<double>(realizations * config.num_intervals);
  const double samples = intervals * static_cast<double>(config.num_devices);
  ResultRow row;
  row.policy = policy;
  row.i_max = config.i_max;
  row.seed = seed;
  row.mean_pde = long_term_pde(pooled);
  row.mean_cd = pooled.cum_comm_delay() / intervals;
  row.mean_pd = pooled.cum_processed() / intervals;
  row.mean_ql = ql / samples;
  row.mean_qu = qu / samples;
  row.mean_qc = qc / samples;
  row.c10_violation_rate = static_cast<double>(violations) / samples;
  row.terminal_uav_distance = terminal / static_cast<double>(realizations);
  return row;
}

SimConfig at_arrival_rate(const SimConfig& config, double i_max) {
  SimConfig c = config;
  c.i_max = i_max;
  return c;
}

QNetwork train_model(const SimConfig& config, std::uint64_t seed) {
  const auto factory = [&config, seed] { return Environment(config, seed); };
  return train(factory, config.train, seed).network;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const SimConfig& config,
                                 const ModelProvider& provider, ExecutionMode mode) {
  if (spec.i_max_values.empty() || spec.seeds.empty() || spec.policies.empty())
    throw std::invalid_argument("run_sweep: empty sweep specification");

  std::vector<PolicyKind> policies = spec.policies;
  std::sort(policies.begin(), policies.end(),
            [](PolicyKind a, PolicyKind b) { return to_string(a) < to_string(b); });
  policies.erase(std::unique(policies.begin(), policies.end()), policies.end());
  std::vector<double> grid = spec.i_max_values;
  std::sort(grid.begin(), grid.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());

  const auto parallel_for = [mode](std::size_t count, const auto& body) {
    std::vector<std::exception_ptr> errors(count);
    const auto guarded = [&](std::size_t i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    if (mode == ExecutionMode::parallel) {
      const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t i = 0; i < n; ++i) guarded(static_cast<std::size_t>(i));
    } else {
      for (std::size_t i = 0; i < count; ++i) guarded(i);
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  };

  // Stage 1: one model per (i_max, seed), or per seed when shared.
  const bool wants_dqn =
      std::find(policies.begin(), policies.end(), PolicyKind::dqn) != policies.end();
  std::vector<std::pair<double, std::uint64_t>> model_keys;
  if (wants_dqn) {
    if (spec.shared_model) {
      for (auto s : seeds) model_keys.emplace_back(config.i_max, s);
    } else {
      for (double i : grid)
        for (auto s : seeds) model_keys.emplace_back(i, s);
    }
  }
  std::vector<QNetwork> models(model_keys.size());
  parallel_for(model_keys.size(), [&](std::size_t i) {
    models[i] = provider(at_arrival_rate(config, model_keys[i].first), model_keys[i].second);
  });
  const auto model_for = [&](double i_max, std::uint64_t seed) -> const QNetwork* {
    for (std::size_t i = 0; i < model_keys.size(); ++i)
      if (model_keys[i].second == seed && (spec.shared_model || model_keys[i].first == i_max))
        return &models[i];
    return nullptr;
  };

  // Stage 2: every row.
  struct Job {
    PolicyKind policy;
    double i_max;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto p : policies)
    for (double i : grid)
      for (auto s : seeds) jobs.push_back({p, i, s});

  std::vector<ResultRow> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const QNetwork* model = job.policy == PolicyKind::dqn ? model_for(job.i_max, job.seed) : nullptr;
    rows[j] = run_eval(job.policy, at_arrival_rate(config, job.i_max), job.seed, spec.realizations,
                       model, {}, ExecutionMode::serial);
  });
  return rows;
}

// CSV ----------------------------------------------------------------------------

std::string format_sig6(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.5e", value);
  const char* e = std::strchr(buf, 'e');
  const int exponent = std::atoi(e + 1);
  const int decimals = std::max(0, 5 - exponent);
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.policy) << ',' << format_sig6(r.i_max) << ',' << r.seed << ','
        << format_sig6(r.mean_pde) << ',' << format_sig6(r.mean_cd) << ','
        << format_sig6(r.mean_pd) << ',' << format_sig6(r.mean_ql) << ','
        << format_sig6(r.mean_qu) << ',' << format_sig6(r.mean_qc) << ','
        << format_sig6(r.c10_violation_rate) << ',' << format_sig6(r.terminal_uav_distance)
        << '\n';
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::runtime_error("emit_csv: no rows to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results to '" + path + "'");
  write_results(out, rows);
  if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader)
    throw std::runtime_error("read_results: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 11) throw std::runtime_error("read_results: expected 11 columns");
    ResultRow r;
    r.policy = parse_policy(cells[0]);
    r.i_max = std::stod(cells[1]);
    r.seed = std::stoull(cells[2]);
    r.mean_pde = std::stod(cells[3]);
    r.mean_cd = std::stod(cells[4]);
    r.mean_pd = std::stod(cells[5]);
    r.mean_ql = std::stod(cells[6]);
    r.mean_qu = std::stod(cells[7]);
    r.mean_qc = std::stod(cells[8]);
    r.c10_violation_rate = std::stod(cells[9]);
    r.terminal_uav_distance = std::stod(cells[10]);
    rows.push_back(r);
  }
  return rows;
}

void write_trajectory_rows(std::ostream& out, const IntervalRecord& record) {
  char buf[512];
  for (std::size_t k = 0; k < record.devices.size(); ++k) {
    const auto& d = record.devices[k];
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n",
                  record.interval, k, d.queues.local, d.queues.uav, d.queues.cloud, d.reward,
                  d.deadline_met ? 1 : 0, d.comm_delay, d.processed);
    out << buf;
  }
}

std::string checkpoint_path(const std::string& dir, double i_max, std::uint64_t seed) {
  char buf[64];
  if (i_max == std::floor(i_max) && std::fabs(i_max) < 1e18)
    std::snprintf(buf, sizeof(buf), "%.0f", i_max);
  else
    std::snprintf(buf, sizeof(buf), "%g", i_max);
  std::string base = dir.empty() ? std::string(".") : dir;
  if (base.back() != '/') base += '/';
  return base + "dqn_" + buf + "_" + std::to_string(seed) + ".ckpt";
}

}  // namespace uavmec
