#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/expert.hpp"
#include "causim/graph.hpp"
#include "causim/nn.hpp"

namespace causim {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 128;
  double learning_rate = 1e-3;
  std::vector<int> hidden = {64, 64};
  Activation activation = Activation::kTanh;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct TrainingLog {
  std::vector<int> epoch;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
};

void write_training_log(const TrainingLog& log, std::ostream& out);
void write_training_log(const TrainingLog& log, const std::string& path);

// Mixture policy over graphs: one network evaluates every conditional
// pi_G(x) = f([x masked by G, G]).
struct GraphPolicy {
  Network net;
  int n = 0;
};

// First n entries x*g elementwise, last n the mask bits as reals.
Eigen::VectorXd masked_input(const Eigen::VectorXd& x, const CausalGraph& g);

// Minimizes the uniform-mixture cross entropy, drawing a fresh graph per
// sample per batch.
GraphPolicy train_graph_policy(const DemoSet& demos, const TrainConfig& config,
                               TrainingLog* log = nullptr);

// Plain behavioral cloning on the raw observation.
Network train_bc(const DemoSet& demos, const TrainConfig& config, TrainingLog* log = nullptr);
// Same, but continuing from an existing network's weights.
Network train_bc_warm(const Network& init, const DemoSet& demos, const TrainConfig& config,
                      TrainingLog* log = nullptr);

// Argmax action, ties broken by lowest index.
int net_act(const Network& net, const Eigen::VectorXd& input);
int policy_act(const GraphPolicy& policy, const Eigen::Vector3d& x, const CausalGraph& g);

struct EvalResult {
  double mean_return = 0.0;
  std::vector<double> returns;
};

// Closed-loop rollouts: under confounded scenarios the observation's action
// channel reflects the acting policy's own previous action.
EvalResult evaluate_actor(const Actor& actor, const Scenario& scenario, int episodes,
                          std::uint64_t seed);
EvalResult eval_bc(const Network& net, const Scenario& scenario, int episodes, std::uint64_t seed);
EvalResult eval_graph_policy(const GraphPolicy& policy, const CausalGraph& g,
                             const Scenario& scenario, int episodes, std::uint64_t seed);

// Mean cross entropy of the fixed-mask conditional on a transition set.
double policy_loss(const GraphPolicy& policy, const std::vector<Transition>& transitions,
                   const CausalGraph& g);
double bc_loss(const Network& net, const std::vector<Transition>& transitions);
double policy_accuracy(const GraphPolicy& policy, const std::vector<Transition>& transitions,
                       const CausalGraph& g);
double bc_accuracy(const Network& net, const std::vector<Transition>& transitions);

// Deterministic shuffled split; the tail fraction becomes the held-out part.
void split_transitions(const std::vector<Transition>& all, double val_fraction,
                       std::uint64_t seed, std::vector<Transition>* train,
                       std::vector<Transition>* val);

void save_graph_policy(const GraphPolicy& policy, const std::string& path);
GraphPolicy load_graph_policy(const std::string& path);

}  // namespace causim
