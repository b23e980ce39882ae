#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/env.hpp"

namespace causim {

// Bang-bang energy pumping: push along the current direction of motion.
// Near-optimal on this track and dependency-free, standing in for a
// separately trained reinforcement-learning expert.
inline int expert_act(const CoreState& state) { return state.velocity >= 0.0 ? 2 : 0; }

// Interactive oracle with exact budget accounting.
class ExpertQuery {
 public:
  int query(const CoreState& state) {
    count_.fetch_add(1, std::memory_order_relaxed);
    return expert_act(state);
  }
  long count() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<long> count_{0};
};

struct Transition {
  int episode_id = 0;
  int t = 0;
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  int action = 0;
};

struct DemoSet {
  std::vector<Transition> transitions;
  Scenario scenario;
  std::string expert_name = "bang-bang";
  std::uint64_t seed = 0;
};

DemoSet collect_demos(const Scenario& scenario, int episodes, std::uint64_t seed);
// Collects whole episodes until at least min_transitions are gathered.
DemoSet collect_demo_transitions(const Scenario& scenario, int min_transitions,
                                 std::uint64_t seed);

void save_demos(const DemoSet& demos, std::ostream& out);
void save_demos(const DemoSet& demos, const std::string& path);
DemoSet load_demos(std::istream& in);
DemoSet load_demos_file(const std::string& path);

}  // namespace causim
