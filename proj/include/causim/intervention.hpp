#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/expert.hpp"
#include "causim/graph.hpp"
#include "causim/policy.hpp"

namespace causim {

// Linear graph energy: p(G) proportional to exp(<w,G>/tau), which factorizes
// as independent Bernoulli(sigma(w_i/tau)) per bit.
struct EnergyModel {
  Eigen::VectorXd w;
  double b = 0.0;
  double tau = 1.0;

  static EnergyModel uniform(int n, double tau = 1.0);
  int size() const { return static_cast<int>(w.size()); }
};

double bit_probability(const EnergyModel& em, int i);
// Energy model whose bit probabilities equal the given marginals at the
// given temperature.
EnergyModel energy_from_prior(const std::vector<double>& marginals, double tau = 1.0);
CausalGraph sample_graph(const EnergyModel& em, Rng& rng);
// argmax_G p(G): bit i set iff w_i > 0.
CausalGraph mode_graph(const EnergyModel& em);
// Exhaustive Boltzmann distribution over all 2^n graphs, indexed by graph
// index. Oracle for the factorization identity; n <= 12.
std::vector<double> enumerate_energy_distribution(const EnergyModel& em);

struct InterventionRecord {
  CausalGraph graph;
  double score = 0.0;
  int episode_index = 0;
};

// Ridge least squares of score on graph bits; tau is carried through.
EnergyModel fit_energy(const std::vector<InterventionRecord>& records, double ridge,
                       double tau = 1.0);

// Normalized product of likelihood and prior over all 2^n graphs (indexed by
// graph index). Brute-force oracle for the energy approximation.
std::vector<double> exact_posterior(const std::vector<double>& likelihood,
                                    const std::vector<double>& prior);

struct InterventionTraceRow {
  int episode_index = 0;
  CausalGraph graph;
  double raw_score = 0.0;
  double standardized_score = 0.0;
  Eigen::VectorXd w;
  double b = 0.0;
  CausalGraph mode_bits;
  double mode_return_estimate = 0.0;
};

struct InterventionResult {
  CausalGraph mode;
  EnergyModel model;
  std::vector<InterventionTraceRow> trace;
};

struct InterventionConfig {
  double ridge = 1e-3;
  double tau_start = 1.0;
  double tau_end = 0.1;  // linear annealing across the run
  // Expert-query search:
  int collect_episodes = 10;     // rollouts of the mixture to gather states
  int graph_samples = 60;        // scored graph draws (one refit each)
  int disagreement_samples = 0;  // 0 = exact enumeration over 2^n graphs
  bool random_state_selection = false;  // ablation: skip disagreement ranking
};

// Executes sampled graph conditionals for N episodes, refitting the energy
// after each return lands.
InterventionResult policy_execution_intervention(const GraphPolicy& policy,
                                                 const Scenario& scenario, int episodes,
                                                 const EnergyModel& em0, std::uint64_t seed,
                                                 const InterventionConfig& config = {});

// Mean KL(pi_G || pi_mix) over graphs drawn from the energy model (exact
// enumeration when sample_count <= 0).
double disagreement_score(const GraphPolicy& policy, const Eigen::VectorXd& x,
                          const EnergyModel& em, int sample_count, Rng& rng);

// Ranks mixture-visited states by disagreement, spends the query budget on
// the top of the ranking, then scores sampled graphs by negated expert loss.
InterventionResult expert_query_intervention(const GraphPolicy& policy, const Scenario& scenario,
                                             ExpertQuery& expert, int budget,
                                             const EnergyModel& em0, std::uint64_t seed,
                                             const InterventionConfig& config = {});

void write_trace(const std::vector<InterventionTraceRow>& trace, std::ostream& out);
void write_trace(const std::vector<InterventionTraceRow>& trace, const std::string& path);
std::vector<InterventionTraceRow> read_trace(std::istream& in);
std::vector<InterventionTraceRow> read_trace_file(const std::string& path);
// Refits on the serialized records; reproduces the final mode exactly.
CausalGraph replay_trace(const std::vector<InterventionTraceRow>& trace, double ridge,
                         double tau = 1.0);

}  // namespace causim
