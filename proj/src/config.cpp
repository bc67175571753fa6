#include "uavmec/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace uavmec {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::random: return "random";
    case PolicyKind::uav_heavy: return "uav_heavy";
    case PolicyKind::cloud_heavy: return "cloud_heavy";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "dqn") return PolicyKind::dqn;
  if (name == "random") return PolicyKind::random;
  if (name == "uav_heavy" || name == "uav") return PolicyKind::uav_heavy;
  if (name == "cloud_heavy" || name == "cloud") return PolicyKind::cloud_heavy;
  throw ConfigError(ConfigError::Kind::bad_value, "unknown policy '" + name + "'");
}

// Derived quantities ---------------------------------------------------------

double SimConfig::eta0_linear() const { return db_to_linear(eta0_db); }

double SimConfig::noise_power() const {
  return noise_power_w ? *noise_power_w : noise_power_from_density(noise_density_dbm_hz, bandwidth);
}

double SimConfig::queue_cap() const { return q_cap ? *q_cap : 4.0 * i_max; }

double SimConfig::local_cpu_alloc() const { return local_cpu ? *local_cpu : local_cpu_max; }

double SimConfig::uav_cpu_alloc() const {
  return uav_cpu ? *uav_cpu : uav_cpu_max / static_cast<double>(num_devices);
}

double SimConfig::cloud_cpu_alloc() const {
  return cloud_cpu ? *cloud_cpu : cloud_cpu_max / static_cast<double>(num_devices);
}

Position2D SimConfig::area_center() const { return {area_width / 2.0, area_height / 2.0}; }

ChannelParams SimConfig::channel_params() const {
  return {eta0_linear(), path_loss_exponent, rice_k, altitude};
}

LinkBudget SimConfig::link_budget() const { return {bandwidth, noise_power(), install_delay}; }

ComputeParams SimConfig::compute_params() const {
  return {cycles_per_bit, local_cpu_alloc(), uav_cpu_max, cloud_cpu_max};
}

FeasibilityLimits SimConfig::feasibility_limits() const {
  FeasibilityLimits l;
  l.p_max = p_max;
  l.local_cpu_max = local_cpu_max;
  l.uav_cpu_max = uav_cpu_max;
  l.cloud_cpu_max = cloud_cpu_max;
  l.v_max = v_max;
  l.tau = tau;
  l.area_width = area_width;
  l.area_height = area_height;
  l.start = area_center();
  l.finish = area_center();
  l.num_intervals = num_intervals;
  return l;
}

// Validation -----------------------------------------------------------------

namespace {

[[noreturn]] void out_of_range(const std::string& key, const std::string& rule, double value) {
  std::ostringstream msg;
  msg << key << ": " << rule << " (got " << value << ")";
  throw ConfigError(ConfigError::Kind::out_of_range, msg.str());
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) out_of_range(key, "must be positive and finite", v);
}

void require_nonnegative(const std::string& key, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) out_of_range(key, "must be non-negative and finite", v);
}

void require_fraction(const std::string& key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) out_of_range(key, "must lie in [0, 1]", v);
}

}  // namespace

void SimConfig::validate() const {
  if (num_devices == 0) out_of_range("num_devices", "must be at least 1", 0);
  require_positive("area_width", area_width);
  require_positive("area_height", area_height);
  require_positive("altitude", altitude);
  require_positive("v_max", v_max);
  require_positive("tau", tau);
  if (num_intervals == 0) out_of_range("num_intervals", "must be at least 1", 0);
  if (!device_positions.empty()) {
    if (device_positions.size() != num_devices)
      out_of_range("device_positions", "must list exactly num_devices positions",
                   static_cast<double>(device_positions.size()));
    for (const auto& p : device_positions)
      if (!(p.x >= 0.0 && p.x <= area_width && p.y >= 0.0 && p.y <= area_height))
        out_of_range("device_positions", "must lie inside the service area", p.x);
  }
  if (!std::isfinite(eta0_db)) out_of_range("eta0_db", "must be finite", eta0_db);
  require_nonnegative("path_loss_exponent", path_loss_exponent);
  if (!(rice_k >= 0.0)) out_of_range("rice_k", "must be non-negative", rice_k);
  require_positive("p_max", p_max);
  if (!(tx_power >= 0.0 && tx_power <= p_max))
    out_of_range("tx_power", "must lie in [0, p_max]", tx_power);
  require_positive("bandwidth", bandwidth);
  if (!std::isfinite(noise_density_dbm_hz))
    out_of_range("noise_density_dbm_hz", "must be finite", noise_density_dbm_hz);
  if (noise_power_w) require_positive("noise_power_w", *noise_power_w);
  require_nonnegative("install_delay", install_delay);
  require_positive("cycles_per_bit", cycles_per_bit);
  require_positive("local_cpu_max", local_cpu_max);
  require_positive("uav_cpu_max", uav_cpu_max);
  require_positive("cloud_cpu_max", cloud_cpu_max);
  if (local_cpu && !(*local_cpu >= 0.0 && *local_cpu <= local_cpu_max))
    out_of_range("local_cpu", "must lie in [0, local_cpu_max]", *local_cpu);
  if (uav_cpu && !(*uav_cpu >= 0.0 && *uav_cpu * num_devices <= uav_cpu_max * (1 + 1e-12)))
    out_of_range("uav_cpu", "times num_devices must not exceed uav_cpu_max", *uav_cpu);
  if (cloud_cpu && !(*cloud_cpu >= 0.0 && *cloud_cpu * num_devices <= cloud_cpu_max * (1 + 1e-12)))
    out_of_range("cloud_cpu", "times num_devices must not exceed cloud_cpu_max", *cloud_cpu);
  require_nonnegative("i_max", i_max);
  require_fraction("w_local", w_local);
  if (fraction_levels.empty()) out_of_range("fraction_levels", "must not be empty", 0);
  for (double f : fraction_levels) require_fraction("fraction_levels", f);
  if (q_cap) require_positive("q_cap", *q_cap);
  if (!q_cap && !(i_max > 0.0))
    out_of_range("q_cap", "must be set explicitly when i_max is 0", 0);
  if (max_catalog_size == 0) out_of_range("max_catalog_size", "must be positive", 0);

  const auto nonneg = [](const char* key, double v) { require_nonnegative(key, v); };
  nonneg("v1", weights.v1);
  nonneg("v2", weights.v2);
  nonneg("v3", weights.v3);
  nonneg("v4", weights.v4);
  nonneg("lyapunov_v", weights.lyapunov_v);
  nonneg("violation_penalty", weights.violation_penalty);

  if (train.hidden_layers.empty()) out_of_range("hidden_layers", "must list at least one layer", 0);
  for (auto h : train.hidden_layers)
    if (h == 0) out_of_range("hidden_layers", "widths must be positive", 0);
  if (!(train.discount >= 0.0 && train.discount < 1.0))
    out_of_range("discount", "must lie in [0, 1)", train.discount);
  require_positive("learning_rate", train.learning_rate);
  if (train.batch_size == 0) out_of_range("batch_size", "must be positive", 0);
  if (train.buffer_capacity < train.batch_size)
    out_of_range("buffer_capacity", "must be at least batch_size",
                 static_cast<double>(train.buffer_capacity));
  if (train.target_sync_period == 0) out_of_range("target_sync_period", "must be positive", 0);
  require_fraction("epsilon_start", train.epsilon_start);
  require_fraction("epsilon_end", train.epsilon_end);
  require_fraction("epsilon_decay_fraction", train.epsilon_decay_fraction);
  if (train.episodes == 0) out_of_range("episodes", "must be positive", 0);
  require_positive("grad_clip", train.grad_clip);
  require_positive("reward_scale", train.reward_scale);

  if (sweep.i_max_values.empty()) out_of_range("sweep_i_max", "must not be empty", 0);
  for (double v : sweep.i_max_values) require_nonnegative("sweep_i_max", v);
  if (sweep.seeds.empty()) out_of_range("sweep_seeds", "must not be empty", 0);
  for (std::size_t i = 0; i < sweep.seeds.size(); ++i)
    for (std::size_t j = i + 1; j < sweep.seeds.size(); ++j)
      if (sweep.seeds[i] == sweep.seeds[j])
        out_of_range("sweep_seeds", "must be distinct", static_cast<double>(sweep.seeds[i]));
  if (sweep.policies.empty()) out_of_range("sweep_policies", "must not be empty", 0);
  if (sweep.realizations == 0) out_of_range("eval_realizations", "must be positive", 0);
}

// Parsing --------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError(ConfigError::Kind::bad_value,
                    key + ": cannot parse '" + value + "' as " + expected);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  if (value == "inf" || value == "+inf") return HUGE_VAL;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(key, value, "a number");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  // Accept integral values written in floating notation, e.g. 1e3.
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc() && ptr == last) return out;
  const double d = to_double(key, value);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) bad_value(key, value, "a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

std::size_t to_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(to_u64(key, value));
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::optional<double> to_optional(const std::string& key, const std::string& value) {
  if (value.empty() || value == "auto") return std::nullopt;
  return to_double(key, value);
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& value, F&& convert) {
  std::vector<T> out;
  for (const auto& item : split(value, ',')) out.push_back(convert(item));
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& convert, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += convert(values[i]);
  }
  return out;
}

struct Field {
  std::function<void(SimConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <typename M>
Field double_field(M member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            member(c) = to_double(k, v);
          },
          [member](const SimConfig& c) { return fmt(member(c)); }};
}

template <typename M>
Field size_field(M member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            member(c) = to_size(k, v);
          },
          [member](const SimConfig& c) {
            return std::to_string(member(c));
          }};
}

template <typename M>
Field optional_field(M member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            member(c) = to_optional(k, v);
          },
          [member](const SimConfig& c) { return fmt_optional(member(c)); }};
}

template <typename M>
Field bool_field(M member) {
  return {[member](SimConfig& c, const std::string& k, const std::string& v) {
            member(c) = to_bool(k, v);
          },
          [member](const SimConfig& c) {
            return std::string(member(c) ? "true" : "false");
          }};
}

#define UAVMEC_MEMBER(expr) [](auto& c) -> auto& { return c.expr; }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["num_devices"] = size_field(UAVMEC_MEMBER(num_devices));
    t["area_width"] = double_field(UAVMEC_MEMBER(area_width));
    t["area_height"] = double_field(UAVMEC_MEMBER(area_height));
    t["altitude"] = double_field(UAVMEC_MEMBER(altitude));
    t["v_max"] = double_field(UAVMEC_MEMBER(v_max));
    t["tau"] = double_field(UAVMEC_MEMBER(tau));
    t["num_intervals"] = size_field(UAVMEC_MEMBER(num_intervals));
    t["device_positions"] = {
        [](SimConfig& c, const std::string& k, const std::string& v) {
          c.device_positions.clear();
          for (const auto& item : split(v, ';')) {
            const auto xy = split(item, ':');
            if (xy.size() != 2) bad_value(k, item, "x:y");
            c.device_positions.push_back({to_double(k, xy[0]), to_double(k, xy[1])});
          }
        },
        [](const SimConfig& c) {
          return join(c.device_positions,
                      [](const Position2D& p) { return fmt(p.x) + ":" + fmt(p.y); }, ";");
        }};
    t["eta0_db"] = double_field(UAVMEC_MEMBER(eta0_db));
    t["path_loss_exponent"] = double_field(UAVMEC_MEMBER(path_loss_exponent));
    t["rice_k"] = double_field(UAVMEC_MEMBER(rice_k));
    t["p_max"] = double_field(UAVMEC_MEMBER(p_max));
    t["tx_power"] = double_field(UAVMEC_MEMBER(tx_power));
    t["bandwidth"] = double_field(UAVMEC_MEMBER(bandwidth));
    t["noise_density_dbm_hz"] = double_field(UAVMEC_MEMBER(noise_density_dbm_hz));
    t["noise_power_w"] = optional_field(UAVMEC_MEMBER(noise_power_w));
    t["install_delay"] = double_field(UAVMEC_MEMBER(install_delay));
    t["cycles_per_bit"] = double_field(UAVMEC_MEMBER(cycles_per_bit));
    t["local_cpu_max"] = double_field(UAVMEC_MEMBER(local_cpu_max));
    t["uav_cpu_max"] = double_field(UAVMEC_MEMBER(uav_cpu_max));
    t["cloud_cpu_max"] = double_field(UAVMEC_MEMBER(cloud_cpu_max));
    t["local_cpu"] = optional_field(UAVMEC_MEMBER(local_cpu));
    t["uav_cpu"] = optional_field(UAVMEC_MEMBER(uav_cpu));
    t["cloud_cpu"] = optional_field(UAVMEC_MEMBER(cloud_cpu));
    t["i_max"] = double_field(UAVMEC_MEMBER(i_max));
    t["w_local"] = double_field(UAVMEC_MEMBER(w_local));
    t["fraction_levels"] = {
        [](SimConfig& c, const std::string& k, const std::string& v) {
          c.fraction_levels = to_list<double>(v, [&](const std::string& s) { return to_double(k, s); });
        },
        [](const SimConfig& c) { return join(c.fraction_levels, fmt); }};
    t["q_cap"] = optional_field(UAVMEC_MEMBER(q_cap));
    t["observe_uav_position"] = bool_field(UAVMEC_MEMBER(observe_uav_position));
    t["max_catalog_size"] = size_field(UAVMEC_MEMBER(max_catalog_size));

    t["v1"] = double_field(UAVMEC_MEMBER(weights.v1));
    t["v2"] = double_field(UAVMEC_MEMBER(weights.v2));
    t["v3"] = double_field(UAVMEC_MEMBER(weights.v3));
    t["v4"] = double_field(UAVMEC_MEMBER(weights.v4));
    t["lyapunov_v"] = double_field(UAVMEC_MEMBER(weights.lyapunov_v));
    t["violation_penalty"] = double_field(UAVMEC_MEMBER(weights.violation_penalty));

    t["hidden_layers"] = {
        [](SimConfig& c, const std::string& k, const std::string& v) {
          c.train.hidden_layers =
              to_list<std::size_t>(v, [&](const std::string& s) { return to_size(k, s); });
        },
        [](const SimConfig& c) {
          return join(c.train.hidden_layers, [](std::size_t h) { return std::to_string(h); });
        }};
    t["discount"] = double_field(UAVMEC_MEMBER(train.discount));
    t["learning_rate"] = double_field(UAVMEC_MEMBER(train.learning_rate));
    t["batch_size"] = size_field(UAVMEC_MEMBER(train.batch_size));
    t["buffer_capacity"] = size_field(UAVMEC_MEMBER(train.buffer_capacity));
    t["target_sync_period"] = size_field(UAVMEC_MEMBER(train.target_sync_period));
    t["epsilon_start"] = double_field(UAVMEC_MEMBER(train.epsilon_start));
    t["epsilon_end"] = double_field(UAVMEC_MEMBER(train.epsilon_end));
    t["epsilon_decay_fraction"] = double_field(UAVMEC_MEMBER(train.epsilon_decay_fraction));
    t["episodes"] = size_field(UAVMEC_MEMBER(train.episodes));
    t["grad_clip"] = double_field(UAVMEC_MEMBER(train.grad_clip));
    t["reward_scale"] = double_field(UAVMEC_MEMBER(train.reward_scale));
    t["optimizer"] = {
        [](SimConfig& c, const std::string& k, const std::string& v) {
          if (v == "sgd")
            c.train.optimizer = OptimizerKind::sgd;
          else if (v == "adam")
            c.train.optimizer = OptimizerKind::adam;
          else
            bad_value(k, v, "sgd or adam");
        },
        [](const SimConfig& c) {
          return std::string(c.train.optimizer == OptimizerKind::adam ? "adam" : "sgd");
        }};

    t["sweep_i_max"] = {
        [](SimConfig& c, const std::string& k, const std::string& v) {
          c.sweep.i_max_values =
              to_list<double>(v, [&](const std::string& s) { return to_double(k, s); });
        },
        [](const SimConfig& c) { return join(c.sweep.i_max_values, fmt); }};
    t["sweep_seeds"] = {
        [](SimConfig& c, const std::string& k, const std::string& v) {
          c.sweep.seeds =
              to_list<std::uint64_t>(v, [&](const std::string& s) { return to_u64(k, s); });
        },
        [](const SimConfig& c) {
          return join(c.sweep.seeds, [](std::uint64_t s) { return std::to_string(s); });
        }};
    t["sweep_policies"] = {
        [](SimConfig& c, const std::string&, const std::string& v) {
          c.sweep.policies = to_list<PolicyKind>(v, [](const std::string& s) { return parse_policy(s); });
        },
        [](const SimConfig& c) {
          return join(c.sweep.policies, [](PolicyKind p) { return to_string(p); });
        }};
    t["eval_realizations"] = size_field(UAVMEC_MEMBER(sweep.realizations));
    t["shared_model"] = bool_field(UAVMEC_MEMBER(sweep.shared_model));
    return t;
  }();
  return table;
}

#undef UAVMEC_MEMBER

void apply_line(SimConfig& config, const std::string& raw, const std::string& where) {
  std::string line = raw;
  if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw ConfigError(ConfigError::Kind::malformed,
                      where + ": expected key=value, got '" + line + "'");
  const std::string key = trim(line.substr(0, eq));
  if (key.empty())
    throw ConfigError(ConfigError::Kind::malformed, where + ": missing key in '" + line + "'");
  apply_setting(config, key, trim(line.substr(eq + 1)));
}

}  // namespace

void apply_setting(SimConfig& config, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end())
    throw ConfigError(ConfigError::Kind::unknown_key, "unknown configuration key '" + key + "'");
  it->second.set(config, key, value);
}

SimConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  SimConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    apply_line(config, line, "line " + std::to_string(line_no));
  }
  for (const auto& o : overrides) apply_line(config, o, "override '" + o + "'");
  config.validate();
  return config;
}

SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigError::Kind::io, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return parse_config(text, overrides);
}

std::map<std::string, std::string> dump_config(const SimConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(config);
  return out;
}

}  // namespace uavmec
