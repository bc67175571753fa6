// Command-line front end: train, eval, sweep, selftest, config.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selftest/checks.hpp"
#include "uavmec/checkpoint.hpp"
#include "uavmec/config.hpp"
#include "uavmec/dqn.hpp"
#include "uavmec/experiment.hpp"

namespace fs = std::filesystem;
using namespace uavmec;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key=value configuration file");
  cmd->add_option("--override", c.overrides, "key=value setting applied after the file")
      ->allow_extra_args(false);
  cmd->add_option("--seed", c.seed, "experiment seed");
  cmd->add_option("--out", c.out, "output directory");
}

std::mutex log_mutex;

void log_line(const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << line << std::endl;
}

QNetwork train_logged(const SimConfig& config, std::uint64_t seed, bool verbose) {
  const std::size_t every = config.train.episodes >= 20 ? config.train.episodes / 10 : 1;
  const auto on_episode = [&](std::size_t episode, double reward) {
    if (!verbose || (episode + 1) % every != 0) return;
    char buf[160];
    std::snprintf(buf, sizeof buf, "train i_max=%g seed=%llu episode %zu/%zu reward %.6g",
                  config.i_max, static_cast<unsigned long long>(seed), episode + 1,
                  config.train.episodes, reward);
    log_line(buf);
  };
  const auto factory = [&config, seed] { return Environment(config, seed); };
  return train(factory, config.train, seed, on_episode).network;
}

void print_row(const ResultRow& row) {
  write_results(std::cout, {row});
}

int cmd_train(const Common& c, bool quiet) {
  const SimConfig config = load_config(c.config_path, c.overrides);
  fs::create_directories(c.out);
  const QNetwork net = train_logged(config, c.seed, !quiet);
  const std::string path = checkpoint_path(c.out, config.i_max, c.seed);
  save_checkpoint(path, net);
  std::cout << path << "\n";
  return 0;
}

int cmd_eval(const Common& c, const std::string& policy_name, std::size_t realizations,
             std::string checkpoint, const std::string& trajectory, const std::string& csv) {
  const SimConfig config = load_config(c.config_path, c.overrides);
  const PolicyKind policy = parse_policy(policy_name);
  if (realizations == 0) realizations = config.sweep.realizations;

  QNetwork model;
  if (policy == PolicyKind::dqn) {
    if (checkpoint.empty()) checkpoint = checkpoint_path(c.out, config.i_max, c.seed);
    model = load_checkpoint(checkpoint);
  }

  std::ofstream traj;
  TrajectorySink sink;
  if (!trajectory.empty()) {
    traj.open(trajectory);
    if (!traj) throw std::runtime_error("cannot write trajectory file " + trajectory);
    traj << kTrajectoryHeader << "\n";
    sink = [&traj](const IntervalRecord& r) { write_trajectory_rows(traj, r); };
  }

  const ResultRow row = run_eval(policy, config, c.seed, realizations,
                                 policy == PolicyKind::dqn ? &model : nullptr, sink);
  if (!csv.empty()) emit_csv({row}, csv);
  print_row(row);
  return 0;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& policies, bool shared,
              bool reuse, bool serial, bool quiet) {
  SimConfig config = load_config(c.config_path, c.overrides);
  if (!policies.empty()) {
    config.sweep.policies.clear();
    for (const auto& p : policies) config.sweep.policies.push_back(parse_policy(p));
  }
  if (shared) config.sweep.shared_model = true;
  fs::create_directories(c.out);

  const ModelProvider provider = [&](const SimConfig& point, std::uint64_t seed) {
    const std::string path = checkpoint_path(c.out, point.i_max, seed);
    if (reuse && fs::exists(path)) return load_checkpoint(path);
    QNetwork net = train_logged(point, seed, !quiet);
    save_checkpoint(path, net);
    return net;
  };
  const auto rows = run_sweep(config.sweep, config, provider,
                              serial ? ExecutionMode::serial : ExecutionMode::parallel);
  const std::string path = (fs::path(c.out) / "sweep.csv").string();
  emit_csv(rows, path);
  std::cout << path << "\n";
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : selftest::run_all(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

int cmd_config(const Common& c) {
  const SimConfig config = load_config(c.config_path, c.overrides);
  for (const auto& [key, value] : dump_config(config)) std::cout << key << "=" << value << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-assisted edge computing simulator and offloading policies"};
  app.require_subcommand(1);

  Common train_opts, eval_opts, sweep_opts, config_opts;
  bool quiet = false;

  auto* train_cmd = app.add_subcommand("train", "train a DQN policy and save a checkpoint");
  add_common(train_cmd, train_opts);
  train_cmd->add_flag("-q,--quiet", quiet, "suppress training progress on stderr");

  std::string policy = "dqn";
  std::size_t realizations = 0;
  std::string checkpoint, trajectory, eval_csv;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate one policy and print a result row");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--policy", policy, "dqn, random, uav_heavy or cloud_heavy");
  eval_cmd->add_option("--realizations", realizations, "episodes to pool (default from config)");
  eval_cmd->add_option("--checkpoint", checkpoint, "model file (default <out>/dqn_<i_max>_<seed>.ckpt)");
  eval_cmd->add_option("--trajectory", trajectory, "per-interval CSV of the first episode");
  eval_cmd->add_option("--csv", eval_csv, "also write the row as a results CSV");

  std::vector<std::string> sweep_policies;
  bool shared = false, reuse = false, serial = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "policies x arrival rates x seeds to <out>/sweep.csv");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--policy", sweep_policies, "restrict to these policies (repeatable)")
      ->allow_extra_args(false);
  sweep_cmd->add_flag("--shared-model", shared, "train one DQN per seed and reuse it on the grid");
  sweep_cmd->add_flag("--reuse-checkpoints", reuse, "load existing checkpoints from <out>");
  sweep_cmd->add_flag("-q,--quiet", quiet, "suppress training progress on stderr");
  sweep_cmd->add_flag("--serial", serial, "run without OpenMP fan-out");

  std::uint64_t selftest_seed = 1;
  auto* selftest_cmd = app.add_subcommand("selftest", "run the oracle and property checks");
  selftest_cmd->add_option("--seed", selftest_seed, "seed for the random instances");

  auto* config_cmd = app.add_subcommand("config", "print the effective configuration");
  add_common(config_cmd, config_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(train_opts, quiet);
    if (*eval_cmd)
      return cmd_eval(eval_opts, policy, realizations, checkpoint, trajectory, eval_csv);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, sweep_policies, shared, reuse, serial, quiet);
    if (*selftest_cmd) return cmd_selftest(selftest_seed);
    if (*config_cmd) return cmd_config(config_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
