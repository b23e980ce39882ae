#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/graph.hpp"
#include "causim/rng.hpp"

namespace causim {

constexpr int kHorizon = 200;
constexpr double kGoalPosition = 0.5;

struct CoreState {
  double position = 0.0;
  double velocity = 0.0;
  int step_count = 0;
};

struct StepResult {
  CoreState state;
  double reward = -1.0;
  bool done = false;
};

// Car on the classic sinusoidal track: force 0.001, gravity 0.0025*cos(3p),
// position in [-1.2, 0.6], speed in [-0.07, 0.07], 200-step horizon.
CoreState reset_car(Rng& rng);
StepResult step_car(const CoreState& state, int action);

enum class ScenarioKind { kOriginal, kConfounded, kConfoundedEntangled };

std::string scenario_kind_name(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& s);

// Observation wrapper. The raw vector is [position, velocity, channel] where
// the channel is the centered previous action (a-1) under the confounded
// kinds and fresh standard-normal noise under original. The permutation
// hides which index is which; the entangled kind additionally mixes all
// three through a fixed orthogonal rotation.
struct Scenario {
  ScenarioKind kind = ScenarioKind::kConfounded;
  std::vector<int> dim_permutation;  // x[i] = raw[dim_permutation[i]]
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  std::uint64_t noise_seed = 0;

  static Scenario make(ScenarioKind kind, std::uint64_t seed);
};

struct Observation {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  // Bits mark observation dimensions that carry true causes (position or
  // velocity). Empty under the entangled kind, where every rotated channel
  // mixes causes with the nuisance and no per-dimension truth exists.
  CausalGraph true_cause_mask;
};

Observation observe(const CoreState& state, int prev_action, const Scenario& scenario, Rng& rng);

// Scenario-level copy of Observation::true_cause_mask (it does not vary per
// step). Empty for the entangled kind.
CausalGraph scenario_true_mask(const Scenario& scenario);

// QR-orthogonalized Gaussian matrix, positive-diagonal convention.
Eigen::Matrix3d make_rotation(std::uint64_t seed);

void write_scenario(const Scenario& scenario, std::ostream& out);
Scenario read_scenario(std::istream& in);

// An actor sees the hidden physical state (experts do) and the wrapped
// observation (policies do) and picks an action.
using Actor = std::function<int(const CoreState&, const Eigen::Vector3d&)>;

struct EpisodeTrace {
  std::vector<CoreState> states;  // state at which each action was taken
  std::vector<Eigen::Vector3d> observations;
  std::vector<int> actions;
  double total_reward = 0.0;
  bool reached_goal = false;
};

EpisodeTrace run_episode(const Scenario& scenario, const Actor& actor, std::uint64_t seed);

}  // namespace causim
