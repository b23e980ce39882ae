#include "causim/env.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace causim {

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

constexpr double kMinPosition = -1.2;
constexpr double kMaxPosition = 0.6;
constexpr double kMaxSpeed = 0.07;
constexpr double kForce = 0.001;
constexpr double kGravity = 0.0025;

}  // namespace

CoreState reset_car(Rng& rng) {
  CoreState s;
  s.position = rng.uniform(-0.6, -0.4);
  s.velocity = 0.0;
  s.step_count = 0;
  return s;
}

StepResult step_car(const CoreState& state, int action) {
  if (action < 0 || action > 2) throw std::domain_error("action must be 0, 1 or 2");
  StepResult r;
  double v = state.velocity + kForce * (action - 1) - kGravity * std::cos(3.0 * state.position);
  v = clip(v, -kMaxSpeed, kMaxSpeed);
  double p = clip(state.position + v, kMinPosition, kMaxPosition);
  if (p == kMinPosition && v < 0.0) v = 0.0;
  r.state.position = p;
  r.state.velocity = v;
  r.state.step_count = state.step_count + 1;
  r.reward = -1.0;
  r.done = p >= kGoalPosition || r.state.step_count >= kHorizon;
  return r;
}

std::string scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kOriginal: return "original";
    case ScenarioKind::kConfounded: return "confounded";
    case ScenarioKind::kConfoundedEntangled: return "confounded_entangled";
  }
  throw std::invalid_argument("bad scenario kind");
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "original") return ScenarioKind::kOriginal;
  if (s == "confounded") return ScenarioKind::kConfounded;
  if (s == "confounded_entangled") return ScenarioKind::kConfoundedEntangled;
  throw std::invalid_argument("unknown scenario kind: " + s);
}

Scenario Scenario::make(ScenarioKind kind, std::uint64_t seed) {
  Scenario sc;
  sc.kind = kind;
  Rng perm_rng(derive_seed(seed, 0));
  sc.dim_permutation = perm_rng.permutation(3);
  if (kind == ScenarioKind::kConfoundedEntangled) sc.rotation = make_rotation(derive_seed(seed, 1));
  sc.noise_seed = derive_seed(seed, 2);
  return sc;
}

Observation observe(const CoreState& state, int prev_action, const Scenario& scenario, Rng& rng) {
  if (prev_action < 0 || prev_action > 2) throw std::domain_error("prev_action must be 0, 1 or 2");
  double raw[3];
  raw[0] = state.position;
  raw[1] = state.velocity;
  raw[2] = scenario.kind == ScenarioKind::kOriginal ? rng.normal()
                                                    : static_cast<double>(prev_action - 1);
  Observation obs;
  for (int i = 0; i < 3; ++i) obs.x(i) = raw[scenario.dim_permutation[i]];
  if (scenario.kind == ScenarioKind::kConfoundedEntangled) {
    obs.x = scenario.rotation * obs.x;
  } else {
    obs.true_cause_mask = scenario_true_mask(scenario);
  }
  return obs;
}

CausalGraph scenario_true_mask(const Scenario& scenario) {
  if (scenario.kind == ScenarioKind::kConfoundedEntangled) return CausalGraph();
  CausalGraph g = CausalGraph::all_zeros(3);
  for (int i = 0; i < 3; ++i) g.bits[i] = scenario.dim_permutation[i] <= 1;
  return g;
}

Eigen::Matrix3d make_rotation(std::uint64_t seed) {
  Rng rng(seed);
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  Eigen::Matrix3d q = qr.householderQ();
  Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 3; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

void write_scenario(const Scenario& scenario, std::ostream& out) {
  out << "scenario.kind " << scenario_kind_name(scenario.kind) << '\n';
  out << "scenario.permutation";
  for (int i : scenario.dim_permutation) out << ' ' << i;
  out << '\n';
  out << "scenario.noise_seed " << scenario.noise_seed << '\n';
  if (scenario.kind == ScenarioKind::kConfoundedEntangled) {
    out << "scenario.rotation" << std::setprecision(17);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out << ' ' << scenario.rotation(i, j);
    out << '\n';
  }
}

Scenario read_scenario(std::istream& in) {
  Scenario sc;
  std::string key, kind_name;
  in >> key >> kind_name;
  if (key != "scenario.kind") throw std::runtime_error("scenario record missing kind");
  sc.kind = parse_scenario_kind(kind_name);
  in >> key;
  if (key != "scenario.permutation") throw std::runtime_error("scenario record missing permutation");
  sc.dim_permutation.resize(3);
  for (int i = 0; i < 3; ++i) in >> sc.dim_permutation[i];
  in >> key >> sc.noise_seed;
  if (key != "scenario.noise_seed") throw std::runtime_error("scenario record missing noise_seed");
  if (sc.kind == ScenarioKind::kConfoundedEntangled) {
    in >> key;
    if (key != "scenario.rotation") throw std::runtime_error("scenario record missing rotation");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) in >> sc.rotation(i, j);
  }
  if (!in) throw std::runtime_error("truncated scenario record");
  return sc;
}

EpisodeTrace run_episode(const Scenario& scenario, const Actor& actor, std::uint64_t seed) {
  Rng rng(derive_seed(scenario.noise_seed, seed));
  EpisodeTrace trace;
  CoreState state = reset_car(rng);
  int prev_action = 1;
  for (;;) {
    const Observation obs = observe(state, prev_action, scenario, rng);
    const int action = actor(state, obs.x);
    trace.states.push_back(state);
    trace.observations.push_back(obs.x);
    trace.actions.push_back(action);
    const StepResult r = step_car(state, action);
    trace.total_reward += r.reward;
    if (r.done) {
      trace.reached_goal = r.state.position >= kGoalPosition;
      return trace;
    }
    state = r.state;
    prev_action = action;
  }
}

}  // namespace causim
