#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/expert.hpp"
#include "causim/policy.hpp"

namespace causim {

struct DaggerConfig {
  int initial_min_transitions = 5000;  // iteration-0 demonstration pool
  int eval_episodes = 20;
  bool warm_start = false;
  TrainConfig train;
};

struct DaggerState {
  DemoSet aggregated;
  Network current_policy;
  int iteration = 0;
  long query_count = 0;
};

struct DaggerPoint {
  int iteration = 0;
  long cumulative_queries = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
};

struct DaggerResult {
  DaggerState state;
  std::vector<DaggerPoint> curve;
};

// Iteration 0 clones fresh expert demonstrations without spending queries.
// Every later iteration rolls the current policy, asks the expert for the
// action at each visited state, folds the labels in, and retrains.
DaggerResult dagger_run(const Scenario& scenario, ExpertQuery& expert, int iterations,
                        int rollouts_per_iter, const DaggerConfig& config, std::uint64_t seed);

void write_dagger_curve(const std::vector<DaggerPoint>& curve, std::ostream& out);
void write_dagger_curve(const std::vector<DaggerPoint>& curve, const std::string& path);

}  // namespace causim
