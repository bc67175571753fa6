#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "uavmec/baselines.hpp"
#include "uavmec/config.hpp"
#include "uavmec/dqn.hpp"
#include "uavmec/experiment.hpp"

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

ConfigError::Kind error_kind(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigError::Kind::io;
}

std::string error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

SimConfig small_config() {
  SimConfig c;
  c.num_intervals = 60;
  c.train.episodes = 3;
  c.train.batch_size = 16;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uavmec_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("an empty configuration yields the default parameter set") {
  const SimConfig c = parse_config("");
  CHECK(c.p_max == 0.1);
  CHECK(c.uav_cpu_max == 5e6);
  CHECK(c.cloud_cpu_max == 1e8);
  CHECK(c.num_intervals == 1000);
  CHECK(c.altitude == 100);
  CHECK(c.eta0_linear() == doctest::Approx(1e-4));
  CHECK(c.v_max == 30);
  CHECK(c.path_loss_exponent == 2);
  CHECK(c.rice_k == 10);
  CHECK(c.bandwidth == 180e3);
  CHECK(c.cycles_per_bit == 1024);
  CHECK(c.install_delay == 0.25);
  CHECK(c.area_width == 500);
  CHECK(c.area_height == 500);
  CHECK(c.num_devices == 2);
  CHECK(c.i_max == 2.5e5);
  CHECK(c.noise_power() == doctest::Approx(7.1663e-16).epsilon(1e-4));
  CHECK(c.queue_cap() == 1e6);
  CHECK(c.uav_cpu_alloc() == 2.5e6);
  CHECK(c.cloud_cpu_alloc() == 5e7);
  CHECK(c.local_cpu_alloc() == 1e6);
  CHECK(load_config("").i_max == 2.5e5);
}

TEST_CASE("file then overrides, in that order") {
  const SimConfig c = parse_config("i_max = 2e5  # comment\nepisodes=7\n", {"i_max=1e5"});
  CHECK(c.i_max == 1e5);
  CHECK(c.train.episodes == 7);
  const SimConfig d = parse_config("# only a comment\n\n", {"noise_power_w=1e-13", "fraction_levels=0.2,0.4,0.8"});
  CHECK(d.noise_power() == 1e-13);
  CHECK(d.fraction_levels == std::vector<double>{0.2, 0.4, 0.8});
  const SimConfig e = parse_config("noise_power_w=1e-13\nnoise_power_w=auto\n");
  CHECK_FALSE(e.noise_power_w.has_value());
}

TEST_CASE("configuration errors are distinct and name the key") {
  CHECK(error_kind("bandwidth=-5") == ConfigError::Kind::out_of_range);
  CHECK(error_message("bandwidth=-5").find("bandwidth") != std::string::npos);
  CHECK(error_kind("bandwith=5") == ConfigError::Kind::unknown_key);
  CHECK(error_message("bandwith=5").find("bandwith") != std::string::npos);
  CHECK(error_kind("just words") == ConfigError::Kind::malformed);
  CHECK(error_message("\n\nnot valid").find("line 3") != std::string::npos);
  CHECK(error_kind("=5") == ConfigError::Kind::malformed);
  CHECK(error_kind("rice_k=lots") == ConfigError::Kind::bad_value);
  CHECK(error_kind("num_devices=2.5") == ConfigError::Kind::bad_value);
  CHECK(error_kind("optimizer=rmsprop") == ConfigError::Kind::bad_value);
  CHECK(error_kind("", {"w_local=1.5"}) == ConfigError::Kind::out_of_range);
  CHECK(error_kind("sweep_seeds=1,2,1") == ConfigError::Kind::out_of_range);
  CHECK(error_kind("tx_power=0.2") == ConfigError::Kind::out_of_range);
  CHECK(error_kind("discount=1") == ConfigError::Kind::out_of_range);
  CHECK(error_kind("device_positions=1:2") == ConfigError::Kind::out_of_range);
  try {
    load_config("/nonexistent/uavmec.cfg");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::io);
  }
}

TEST_CASE("dumped configuration parses back to the same configuration") {
  const SimConfig c = parse_config(
      "num_devices=1\ndevice_positions=10:20\nrice_k=3.5\noptimizer=adam\nsweep_policies=dqn,random\n"
      "hidden_layers=32,16\nq_cap=12345\nobserve_uav_position=true\nshared_model=1\n");
  std::string text;
  for (const auto& [k, v] : dump_config(c)) text += k + "=" + v + "\n";
  const SimConfig back = parse_config(text);
  CHECK(dump_config(back) == dump_config(c));
  CHECK(back.device_positions == std::vector<Position2D>{{10, 20}});
  CHECK(back.train.optimizer == OptimizerKind::adam);
  CHECK(back.sweep.shared_model);
  CHECK(back.observe_uav_position);
  CHECK(*back.q_cap == 12345);
}

TEST_CASE("policy names") {
  for (auto p : {PolicyKind::dqn, PolicyKind::random, PolicyKind::uav_heavy, PolicyKind::cloud_heavy})
    CHECK(parse_policy(to_string(p)) == p);
  CHECK(parse_policy("uav") == PolicyKind::uav_heavy);
  CHECK(parse_policy("cloud") == PolicyKind::cloud_heavy);
  CHECK_THROWS_AS(parse_policy("greedy"), ConfigError);
}

TEST_CASE("zero arrivals produce zero throughput") {
  SimConfig c = small_config();
  c.i_max = 0;
  c.q_cap = 1e6;
  for (auto p : {PolicyKind::random, PolicyKind::uav_heavy, PolicyKind::cloud_heavy}) {
    const auto row = run_eval(p, c, 1, 3);
    CHECK(row.mean_pd == 0.0);
    CHECK(row.mean_pde == 0.0);
    CHECK(row.mean_ql == 0.0);
  }
}

TEST_CASE("a single realization equals a direct episode computation") {
  const SimConfig c = small_config();
  const auto row = run_eval(PolicyKind::cloud_heavy, c, 4, 1);

  Environment env(c, 4);
  env.reset(evaluation_episode_seed(4, 0));
  Rng rng = make_stream(4, StreamTag::policy, 0);
  double bits = 0, delay = 0, ql = 0, qu = 0, qc = 0, violations = 0;
  while (!env.done()) {
    const auto t = env.step(baseline_action(PolicyKind::cloud_heavy, c, rng));
    for (const auto& d : t.interval.devices) {
      bits += d.processed;
      delay += d.comm_delay;
      ql += d.queues.local;
      qu += d.queues.uav;
      qc += d.queues.cloud;
      violations += d.deadline_met ? 0 : 1;
    }
  }
  const double n = double(c.num_intervals), samples = n * double(c.num_devices);
  CHECK(testgen::rel_diff(row.mean_pde, bits / delay) <= 1e-12);
  CHECK(testgen::rel_diff(row.mean_pd, bits / n) <= 1e-12);
  CHECK(testgen::rel_diff(row.mean_cd, delay / n) <= 1e-12);
  CHECK(testgen::rel_diff(row.mean_ql, ql / samples) <= 1e-12);
  CHECK(testgen::rel_diff(row.mean_qu, qu / samples) <= 1e-12);
  CHECK(testgen::rel_diff(row.mean_qc, qc / samples) <= 1e-12);
  CHECK(row.c10_violation_rate == doctest::Approx(violations / samples));
  CHECK(row.terminal_uav_distance == 0.0);
}

TEST_CASE("evaluation is deterministic and schedule independent") {
  const SimConfig c = small_config();
  const QNetwork model = train_model(c, 2);
  for (auto p : {PolicyKind::dqn, PolicyKind::random}) {
    const QNetwork* m = p == PolicyKind::dqn ? &model : nullptr;
    const auto a = run_eval(p, c, 2, 8, m, {}, ExecutionMode::serial);
    const auto b = run_eval(p, c, 2, 8, m, {}, ExecutionMode::parallel);
    const auto again = run_eval(p, c, 2, 8, m, {}, ExecutionMode::parallel);
    std::ostringstream sa, sb, sc;
    write_results(sa, {a});
    write_results(sb, {b});
    write_results(sc, {again});
    CHECK(sa.str() == sb.str());
    CHECK(sb.str() == sc.str());
    CHECK(a.mean_pde == b.mean_pde);
  }
}

TEST_CASE("evaluation errors") {
  const SimConfig c = small_config();
  CHECK_THROWS_AS(run_eval(PolicyKind::dqn, c, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(run_eval(PolicyKind::random, c, 1, 0), std::invalid_argument);
  const QNetwork wrong({3, 4, 5});
  CHECK_THROWS_AS(run_eval(PolicyKind::dqn, c, 1, 2, &wrong), std::invalid_argument);
}

TEST_CASE("trajectory dump recomputes the figure quantities") {
  const SimConfig c = small_config();
  std::ostringstream traj;
  traj << kTrajectoryHeader << "\n";
  const auto row = run_eval(PolicyKind::random, c, 3, 1, nullptr,
                            [&traj](const IntervalRecord& r) { write_trajectory_rows(traj, r); });

  std::istringstream in(traj.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kTrajectoryHeader);
  double bits = 0, delay = 0;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    std::vector<double> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 9);
    delay += cells[7];
    bits += cells[8];
    ++lines;
  }
  CHECK(lines == c.num_intervals * c.num_devices);
  const double n = double(c.num_intervals);
  CHECK(testgen::rel_diff(bits / delay, row.mean_pde) <= 1e-9);
  CHECK(testgen::rel_diff(delay / n, row.mean_cd) <= 1e-9);
  CHECK(testgen::rel_diff(bits / n, row.mean_pd) <= 1e-9);
}

TEST_CASE("sweep shape, ordering and determinism") {
  SimConfig c = small_config();
  SweepSpec spec;
  spec.seeds = {3, 1, 2};
  spec.realizations = 2;
  c.sweep = spec;
  int trained = 0;
  const ModelProvider provider = [&trained](const SimConfig& point, std::uint64_t seed) {
#pragma omp atomic
    ++trained;
    return train_model(point, seed);
  };
  const auto rows = run_sweep(spec, c, provider, ExecutionMode::serial);
  CHECK(rows.size() == 60);
  CHECK(trained == 15);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    const auto key = [](const ResultRow& r) { return std::make_tuple(to_string(r.policy), r.i_max, r.seed); };
    CHECK(key(a) < key(b));
  }
  CHECK(rows.front().policy == PolicyKind::cloud_heavy);
  CHECK(rows.back().policy == PolicyKind::uav_heavy);

  const auto parallel = run_sweep(spec, c, train_model, ExecutionMode::parallel);
  std::ostringstream a, b;
  write_results(a, rows);
  write_results(b, parallel);
  CHECK(a.str() == b.str());

  spec.shared_model = true;
  trained = 0;
  run_sweep(spec, c, provider, ExecutionMode::serial);
  CHECK(trained == 3);

  spec.policies = {PolicyKind::random};
  trained = 0;
  CHECK(run_sweep(spec, c, provider).size() == 15);
  CHECK(trained == 0);

  spec.seeds.clear();
  CHECK_THROWS_AS(run_sweep(spec, c, provider), std::invalid_argument);
}

TEST_CASE("mean processed data grows with the arrival rate") {
  SimConfig c = small_config();
  c.num_intervals = 200;
  SweepSpec spec;
  spec.policies = {PolicyKind::random, PolicyKind::uav_heavy, PolicyKind::cloud_heavy};
  spec.seeds = {1, 2, 3};
  spec.realizations = 4;
  const auto rows = run_sweep(spec, c, train_model);
  for (auto p : spec.policies) {
    std::vector<double> mean_pd;
    for (double i : spec.i_max_values) {
      double sum = 0;
      for (const auto& r : rows)
        if (r.policy == p && r.i_max == i) sum += r.mean_pd;
      mean_pd.push_back(sum / 3);
    }
    for (std::size_t i = 1; i < mean_pd.size(); ++i) CHECK(mean_pd[i] >= mean_pd[i - 1]);
  }
}

TEST_CASE("six significant digits in plain decimal notation") {
  CHECK(format_sig6(0) == "0");
  CHECK(format_sig6(250000) == "250000");
  CHECK(format_sig6(50000) == "50000.0");
  CHECK(format_sig6(1.86451234) == "1.86451");
  CHECK(format_sig6(0.000123456789) == "0.000123457");
  CHECK(format_sig6(-12.3456789) == "-12.3457");
  CHECK(format_sig6(123456789) == "123456789");
  CHECK(format_sig6(0.97) == "0.970000");
}

TEST_CASE("results CSV format") {
  ResultRow r;
  r.policy = PolicyKind::uav_heavy;
  r.i_max = 2.5e5;
  r.seed = 4;
  r.mean_pde = 133180.4567;
  r.mean_cd = 1.864512345;
  r.mean_pd = 248301.123;
  r.mean_ql = 1.5e5;
  r.mean_qu = 7.77777777e4;
  r.mean_qc = 3.14159265;
  r.c10_violation_rate = 0.999;
  r.terminal_uav_distance = 0;

  std::ostringstream out;
  write_results(out, {r});
  const std::string text = out.str();
  CHECK(text.back() == '\n');
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.substr(0, text.find('\n')) ==
        "policy,i_max,seed,mean_pde,mean_cd,mean_pd,mean_ql,mean_qu,mean_qc,c10_violation_rate,"
        "terminal_uav_distance");

  std::vector<ResultRow> many(5, r);
  many[2].policy = PolicyKind::dqn;
  std::ostringstream more;
  write_results(more, many);
  std::istringstream lines(more.str());
  for (std::string line; std::getline(lines, line);) CHECK(std::count(line.begin(), line.end(), ',') == 10);

  std::istringstream in(text);
  const auto back = read_results(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].policy == r.policy);
  CHECK(back[0].seed == 4);
  for (auto [got, want] : {std::pair{back[0].mean_pde, r.mean_pde}, {back[0].mean_cd, r.mean_cd},
                           {back[0].mean_qu, r.mean_qu}, {back[0].mean_qc, r.mean_qc}})
    CHECK(testgen::rel_diff(got, want) <= 5e-6);
}

TEST_CASE("emit_csv errors and output") {
  const auto dir = scratch_dir("csv");
  CHECK_THROWS_AS(emit_csv({}, (dir / "x.csv").string()), std::runtime_error);
  CHECK_THROWS_AS(emit_csv({ResultRow{}}, (dir / "missing" / "x.csv").string()), std::runtime_error);
  emit_csv({ResultRow{}}, (dir / "ok.csv").string());
  std::ifstream in(dir / "ok.csv");
  CHECK(read_results(in).size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint path convention") {
  CHECK(checkpoint_path("out", 2.5e5, 3) == "out/dqn_250000_3.ckpt");
  CHECK(checkpoint_path("out/", 50000, 1) == "out/dqn_50000_1.ckpt");
  CHECK(checkpoint_path("", 1e5, 12) == "./dqn_100000_12.ckpt");
}
