#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/environment.hpp"
#include "uavmec/qnetwork.hpp"

namespace uavmec {

struct ResultRow {
  PolicyKind policy = PolicyKind::random;
  double i_max = 0.0;
  std::uint64_t seed = 0;
  double mean_pde = 0.0;  // bits/s
  double mean_cd = 0.0;   // s per interval, summed over devices
  double mean_pd = 0.0;   // bits per interval, summed over devices
  double mean_ql = 0.0;   // bits, averaged over devices and intervals
  double mean_qu = 0.0;
  double mean_qc = 0.0;
  double c10_violation_rate = 0.0;
  double terminal_uav_distance = 0.0;  // m from the final waypoint
};

/// Receives every interval of the first evaluated realization.
using TrajectorySink = std::function<void(const IntervalRecord&)>;

enum class ExecutionMode { serial, parallel };

/// Runs `realizations` independent episodes of a frozen policy and pools
/// them into one row. `model` is required for PolicyKind::dqn.
ResultRow run_eval(PolicyKind policy, const SimConfig& config, std::uint64_t seed,
                   std::size_t realizations, const QNetwork* model = nullptr,
                   const TrajectorySink& sink = {},
                   ExecutionMode mode = ExecutionMode::parallel);

/// Produces the DQN model for one sweep point (train, or load from disk).
using ModelProvider = std::function<QNetwork(const SimConfig& point_config, std::uint64_t seed)>;

/// A provider that trains with config.train and the sweep seed.
QNetwork train_model(const SimConfig& config, std::uint64_t seed);

/// policies x i_max values x seeds, rows sorted by (policy name, i_max,
/// seed). Models are produced first (one per point and seed), then every row
/// is evaluated; both stages fan out over OpenMP threads in parallel mode and
/// give identical rows in either mode. With shared_model the DQN
/// is trained once per seed at config.i_max and reused for every i_max.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const SimConfig& config,
                                 const ModelProvider& provider,
                                 ExecutionMode mode = ExecutionMode::parallel);

/// The configuration used at one point of an arrival-rate sweep.
SimConfig at_arrival_rate(const SimConfig& config, double i_max);

// CSV output --------------------------------------------------------------

inline constexpr const char* kResultHeader =
    "policy,i_max,seed,mean_pde,mean_cd,mean_pd,mean_ql,mean_qu,mean_qc,c10_violation_rate,"
    "terminal_uav_distance";

inline constexpr const char* kTrajectoryHeader =
    "interval,device,ql,qu,qc,reward,eta,t_comm,b_tot";

/// Decimal (non-exponent) notation rounded to 6 significant digits.
std::string format_sig6(double value);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
/// Throws std::runtime_error if rows is empty or the path cannot be written.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_results(std::istream& in);

/// One line per device; values at full round-trip precision.
void write_trajectory_rows(std::ostream& out, const IntervalRecord& record);

/// `<dir>/dqn_<i_max>_<seed>.ckpt`
std::string checkpoint_path(const std::string& dir, double i_max, std::uint64_t seed);

}  // namespace uavmec
