#include "swarmopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace swarm {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

double require_number(const json& j, const std::string& path) {
  if (!j.is_number())
    throw ConfigError("scenario: " + path + " must be a number");
  return j.get<double>();
}

const json& require_field(const json& j, const std::string& key,
                          const std::string& path) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError("scenario: missing field " + path + "." + key);
  return *it;
}

Eigen::Vector3d parse_state(const json& j, const std::string& path) {
  Eigen::Vector3d v;
  v[0] = require_number(require_field(j, "x_m", path), path + ".x_m");
  v[1] = require_number(require_field(j, "y_m", path), path + ".y_m");
  v[2] = kDegToRad * require_number(require_field(j, "heading_deg", path),
                                    path + ".heading_deg");
  return v;
}

json state_to_json(const Eigen::Vector3d& v) {
  return json{{"x_m", v[0]}, {"y_m", v[1]}, {"heading_deg", v[2] / kDegToRad}};
}

json value_from_text(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);  // bare string
  return v;
}

}  // namespace

std::vector<Eigen::Vector2d> ScenarioConfig::initial_positions() const {
  std::vector<Eigen::Vector2d> out;
  out.reserve(agents.size());
  for (const AgentSpec& a : agents) out.push_back(a.initial.head<2>());
  return out;
}

ScenarioConfig ScenarioConfig::effective() const {
  ScenarioConfig c = *this;
  if (sync_baseline()) {
    c.p_con = 1.0;
    c.barrier_S = num_agents();
    c.delay_bound = 1;
    c.latency_min = c.latency_max = 1.0;
    c.symmetric_loss = false;
  }
  return c;
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::vector<std::string>& overrides) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded())
    throw ConfigError("scenario: malformed JSON");

  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("scenario override must look like key.path=value: " +
                        ov);
    std::string path = ov.substr(0, eq);
    json* node = &root;
    size_t start = 0;
    while (true) {
      const size_t dot = path.find('.', start);
      const std::string key = path.substr(start, dot - start);
      if (dot == std::string::npos) {
        (*node)[key] = value_from_text(ov.substr(eq + 1));
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }

  ScenarioConfig c;
  c.name = root.value("name", c.name);

  const json& model = require_field(root, "model", "");
  c.speed = require_number(require_field(model, "speed_mps", "model"),
                           "model.speed_mps");
  c.omega_max = require_number(require_field(model, "omega_max_rads", "model"),
                               "model.omega_max_rads");
  c.horizon_steps = require_field(model, "horizon_steps", "model").get<int>();

  const json& time = require_field(root, "time", "");
  c.t_min = require_number(require_field(time, "t_min_s", "time"),
                           "time.t_min_s");
  c.t_max = require_number(require_field(time, "t_max_s", "time"),
                           "time.t_max_s");
  c.theta_guess = require_number(
      require_field(time, "initial_guess_s", "time"), "time.initial_guess_s");

  const json& agents = require_field(root, "agents", "");
  if (!agents.is_array() || agents.empty())
    throw ConfigError("scenario: agents must be a non-empty array");
  for (size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    AgentSpec spec;
    spec.initial =
        parse_state(require_field(agents[i], "initial", path), path + ".initial");
    spec.target =
        parse_state(require_field(agents[i], "target", path), path + ".target");
    c.agents.push_back(spec);
  }

  const json& cost = require_field(root, "cost", "");
  c.terminal_weight = require_number(
      require_field(cost, "terminal_weight", "cost"), "cost.terminal_weight");
  c.control_weight = require_number(
      require_field(cost, "control_weight", "cost"), "cost.control_weight");
  c.state_weight = require_number(require_field(cost, "state_weight", "cost"),
                                  "cost.state_weight");

  const json& obst = require_field(root, "obstacles", "");
  c.obstacles.safe_margin = require_number(
      require_field(obst, "safe_margin_m", "obstacles"),
      "obstacles.safe_margin_m");
  for (const json& circle : require_field(obst, "circles", "obstacles")) {
    Circle cc;
    cc.center[0] = require_number(require_field(circle, "x_m", "circle"),
                                  "obstacles.circles.x_m");
    cc.center[1] = require_number(require_field(circle, "y_m", "circle"),
                                  "obstacles.circles.y_m");
    cc.radius = require_number(require_field(circle, "radius_m", "circle"),
                               "obstacles.circles.radius_m");
    c.obstacles.circles.push_back(cc);
  }

  const json& prox = require_field(root, "proximity", "");
  c.prox.d_col = require_number(require_field(prox, "collision_m", "proximity"),
                                "proximity.collision_m");
  c.prox.d_con = require_number(
      require_field(prox, "connectivity_m", "proximity"),
      "proximity.connectivity_m");

  c.neighborhood_size =
      require_field(root, "neighborhood_size", "").get<int>();

  const json& seq = require_field(root, "time_sequence", "");
  c.seq_interval = require_number(
      require_field(seq, "interval_s", "time_sequence"),
      "time_sequence.interval_s");
  c.seq_relax_eps = require_number(
      require_field(seq, "relax_eps_s", "time_sequence"),
      "time_sequence.relax_eps_s");
  if (seq.contains("order"))
    c.arrival_order = seq["order"].get<std::vector<int>>();

  const json& pen = require_field(root, "penalties", "");
  c.penalties.control = require_number(
      require_field(pen, "control", "penalties"), "penalties.control");
  c.penalties.state = require_number(require_field(pen, "state", "penalties"),
                                     "penalties.state");
  c.penalties.consensus_state = require_number(
      require_field(pen, "consensus_state", "penalties"),
      "penalties.consensus_state");
  c.penalties.time = require_number(require_field(pen, "time", "penalties"),
                                    "penalties.time");
  c.penalties.consensus_time = require_number(
      require_field(pen, "consensus_time", "penalties"),
      "penalties.consensus_time");

  const json& pddp = require_field(root, "pddp", "");
  c.damping = require_number(require_field(pddp, "damping", "pddp"),
                             "pddp.damping");
  c.pddp_max_iters = pddp.value("max_iters", c.pddp_max_iters);
  c.pddp_cost_tol = pddp.value("cost_tol", c.pddp_cost_tol);
  c.init_max_iters = pddp.value("init_max_iters", c.init_max_iters);

  const json& stop = require_field(root, "stopping", "");
  c.eps_abs = require_number(require_field(stop, "eps_abs", "stopping"),
                             "stopping.eps_abs");
  c.eps_rel = require_number(require_field(stop, "eps_rel", "stopping"),
                             "stopping.eps_rel");

  const json& proto = require_field(root, "protocol", "");
  c.barrier_S = require_field(proto, "barrier_s", "protocol").get<int>();
  c.delay_bound = require_field(proto, "delay_bound", "protocol").get<int>();
  c.p_con = require_number(require_field(proto, "p_con", "protocol"),
                           "protocol.p_con");
  c.seed = proto.value("seed", c.seed);
  c.commit_cap = proto.value("commit_cap", c.commit_cap);
  c.virtual_time_cap = proto.value("virtual_time_cap", c.virtual_time_cap);
  c.link_latency = proto.value("link_latency", c.link_latency);
  c.retry_backoff = proto.value("retry_backoff", c.retry_backoff);
  c.latency_min = proto.value("latency_min", c.latency_min);
  c.latency_max = proto.value("latency_max", c.latency_max);
  c.symmetric_loss = proto.value("symmetric_loss", c.symmetric_loss);

  c.mode = root.value("mode", c.mode);

  validate_scenario(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json root;
  root["name"] = c.name;
  root["model"] = {{"speed_mps", c.speed},
                   {"omega_max_rads", c.omega_max},
                   {"horizon_steps", c.horizon_steps}};
  root["time"] = {{"t_min_s", c.t_min},
                  {"t_max_s", c.t_max},
                  {"initial_guess_s", c.theta_guess}};
  root["agents"] = json::array();
  for (const AgentSpec& a : c.agents)
    root["agents"].push_back(
        {{"initial", state_to_json(a.initial)}, {"target", state_to_json(a.target)}});
  root["cost"] = {{"terminal_weight", c.terminal_weight},
                  {"control_weight", c.control_weight},
                  {"state_weight", c.state_weight}};
  json circles = json::array();
  for (const Circle& cc : c.obstacles.circles)
    circles.push_back(
        {{"x_m", cc.center[0]}, {"y_m", cc.center[1]}, {"radius_m", cc.radius}});
  root["obstacles"] = {{"safe_margin_m", c.obstacles.safe_margin},
                       {"circles", circles}};
  root["proximity"] = {{"collision_m", c.prox.d_col},
                       {"connectivity_m", c.prox.d_con}};
  root["neighborhood_size"] = c.neighborhood_size;
  root["time_sequence"] = {{"interval_s", c.seq_interval},
                           {"relax_eps_s", c.seq_relax_eps}};
  if (!c.arrival_order.empty())
    root["time_sequence"]["order"] = c.arrival_order;
  root["penalties"] = {{"control", c.penalties.control},
                       {"state", c.penalties.state},
                       {"consensus_state", c.penalties.consensus_state},
                       {"time", c.penalties.time},
                       {"consensus_time", c.penalties.consensus_time}};
  root["pddp"] = {{"damping", c.damping},
                  {"max_iters", c.pddp_max_iters},
                  {"cost_tol", c.pddp_cost_tol},
                  {"init_max_iters", c.init_max_iters}};
  root["stopping"] = {{"eps_abs", c.eps_abs}, {"eps_rel", c.eps_rel}};
  root["protocol"] = {{"barrier_s", c.barrier_S},
                      {"delay_bound", c.delay_bound},
                      {"p_con", c.p_con},
                      {"seed", c.seed},
                      {"commit_cap", c.commit_cap},
                      {"virtual_time_cap", c.virtual_time_cap},
                      {"link_latency", c.link_latency},
                      {"retry_backoff", c.retry_backoff},
                      {"latency_min", c.latency_min},
                      {"latency_max", c.latency_max},
                      {"symmetric_loss", c.symmetric_loss}};
  root["mode"] = c.mode;
  return root.dump(2) + "\n";
}

void validate_scenario(const ScenarioConfig& c) {
  const int m = c.num_agents();
  if (m < 1) throw ConfigError("scenario: agents must be non-empty");
  if (!(c.speed > 0)) throw ConfigError("scenario: model.speed_mps must be > 0");
  if (!(c.omega_max > 0))
    throw ConfigError("scenario: model.omega_max_rads must be > 0");
  if (c.horizon_steps < 2)
    throw ConfigError("scenario: model.horizon_steps must be >= 2");
  if (!(c.t_min > 0) || !(c.t_min < c.t_max))
    throw ConfigError("scenario: time bounds require 0 < t_min_s < t_max_s");
  if (c.theta_guess < c.t_min || c.theta_guess > c.t_max)
    throw ConfigError("scenario: time.initial_guess_s outside bounds");
  if (!(c.prox.d_col > 0) || !(c.prox.d_col < c.prox.d_con))
    throw ConfigError(
        "scenario: proximity requires 0 < collision_m < connectivity_m");
  if (c.neighborhood_size < 1 || c.neighborhood_size > m)
    throw ConfigError("scenario: neighborhood_size must be in [1, M]");
  if (!c.penalties.valid())
    throw ConfigError("scenario: penalties must all be positive");
  if (!(c.damping > 0) || c.damping > 1)
    throw ConfigError("scenario: pddp.damping must be in (0, 1]");
  if (!(c.eps_abs > 0) || !(c.eps_rel > 0))
    throw ConfigError("scenario: stopping tolerances must be positive");
  if (c.barrier_S < 1 || c.barrier_S > m)
    throw ConfigError("scenario: protocol.barrier_s must be in [1, M]");
  if (c.delay_bound < 1)
    throw ConfigError("scenario: protocol.delay_bound must be >= 1");
  if (c.p_con < 0 || c.p_con > 1)
    throw ConfigError("scenario: protocol.p_con must be in [0, 1]");
  if (!(c.latency_min > 0) || c.latency_max < c.latency_min)
    throw ConfigError("scenario: protocol latency range invalid");
  if (!(c.link_latency > 0) || !(c.retry_backoff > 0))
    throw ConfigError("scenario: protocol delays must be positive");
  if (c.commit_cap < 1 || !(c.virtual_time_cap > 0))
    throw ConfigError("scenario: protocol caps must be positive");
  if (c.mode != "async" && c.mode != "sync")
    throw ConfigError("scenario: mode must be async or sync");
  if (c.seq_relax_eps < 0)
    throw ConfigError("scenario: time_sequence.relax_eps_s must be >= 0");
  if (!c.arrival_order.empty()) {
    if (static_cast<int>(c.arrival_order.size()) != m)
      throw ConfigError("scenario: time_sequence.order size must equal M");
    std::vector<bool> seen(m, false);
    for (int r : c.arrival_order) {
      if (r < 0 || r >= m || seen[r])
        throw ConfigError("scenario: time_sequence.order must be a permutation");
      seen[r] = true;
    }
  }
  for (const Circle& cc : c.obstacles.circles)
    if (!(cc.radius > 0))
      throw ConfigError("scenario: obstacle radius must be > 0");
  if (c.obstacles.safe_margin < 0)
    throw ConfigError("scenario: obstacles.safe_margin_m must be >= 0");

  // pairwise distinct initial positions (the graph needs them) and an
  // eagerly checked arrival-sequence feasibility against the time bounds
  const auto pos = c.initial_positions();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((pos[i] - pos[j]).norm() < 1e-9)
        throw ConfigError("scenario: agents " + std::to_string(i) + " and " +
                          std::to_string(j) + " share an initial position");
  const NeighborGraph graph = build_neighbor_graph(pos, c.neighborhood_size);
  for (AgentId i = 0; i < m; ++i)
    for (AgentId j : graph.neighbors[i]) {
      if (j == i) continue;
      const double delta = c.seq_interval * (c.rank_of(i) - c.rank_of(j));
      if (std::abs(delta) - c.seq_relax_eps > c.t_max - c.t_min)
        throw ConfigError(
            "scenario: time_sequence interval between agents " +
            std::to_string(i) + " and " + std::to_string(j) +
            " cannot fit inside the flight-time bounds");
    }
}

}  // namespace swarm
