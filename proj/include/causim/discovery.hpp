#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/expert.hpp"
#include "causim/graph.hpp"
#include "causim/nn.hpp"
#include "causim/policy.hpp"

namespace causim {

// Small discrete functional causal model: a confounder Z drives every state
// variable, and the action depends only on the variables the graph marks as
// parents. Serves as the exact oracle for interventional queries.
struct TabularFCM {
  int n = 0;
  CausalGraph graph;
  int z_cardinality = 0;
  int state_cardinality = 0;
  int action_cardinality = 0;
  // state_tables[i][z][v] = p(X_i = v | Z = z)
  std::vector<std::vector<std::vector<double>>> state_tables;
  // action_table[masked_index][a] = p(A = a | masked parents); masked_index
  // enumerates parent assignments with non-parents pinned to 0.
  std::vector<std::vector<double>> action_table;

  int masked_index(const std::vector<int>& x_assignment) const;
};

// p(A | do(X = x)): the confounder is severed, the table answers directly.
std::vector<double> interventional_query(const TabularFCM& fcm,
                                         const std::vector<int>& x_assignment);

// Samples a faithful FCM on the given graph: every parent has a context
// where toggling it moves the action distribution by TV > 0.05. Throws after
// the resample cap.
TabularFCM random_faithful_fcm(int n, const CausalGraph& graph, Rng& rng);

// Proposition oracle: FCMs on distinct graphs must disagree on some
// interventional query, and an FCM agrees with itself everywhere.
bool proposition_check(int n, Rng& rng, std::string* failure = nullptr);

struct MISample {
  Eigen::VectorXd x;
  int a = 0;
  Eigen::VectorXd z;
};

std::vector<MISample> mi_samples_from_demos(const DemoSet& demos);

// KSG-style mixed discrete/continuous estimator (k = 5), in bits, clipped
// at zero. conditional = true estimates I(X_i; A | Z).
double estimate_mi(const std::vector<MISample>& samples, int dim, bool conditional, int k = 5);

struct MIReportRow {
  int dim = 0;
  double marginal_mi_bits = 0.0;
  double conditional_mi_bits = 0.0;
};

std::vector<MIReportRow> mi_report(const std::vector<MISample>& samples, int k = 5);
void write_mi_report(const std::vector<MIReportRow>& rows, std::ostream& out);
void write_mi_report(const std::vector<MIReportRow>& rows, const std::string& path);

struct VariationalConfig {
  int latent_dim = 4;
  double prior_strength = 0.0;  // lambda; log p(G) = -lambda * popcount(G)
  double gumbel_tau = 1.0;
  int steps = 3000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::vector<int> infer_hidden = {32};
  std::vector<int> policy_hidden = {64, 64};
  std::vector<int> recon_hidden = {32};
  std::uint64_t seed = 0;
};

struct VariationalModel {
  int n = 0;
  int latent_dim = 0;
  Network infer_net;   // U -> n logits
  GraphPolicy policy;  // shared conditional f([x masked, mask])
  Network recon_net;   // G -> latent mean (unit-variance Gaussian)
  double prior_strength = 0.0;
  double gumbel_tau = 1.0;
};

// Per-bit binary-concrete draw. The hard bit is exactly
// Bernoulli(sigma(logit)) at any temperature; the relaxed value carries the
// gradient in the straight-through pass.
struct GumbelBit {
  double relaxed = 0.0;
  double hard = 0.0;
};
GumbelBit gumbel_bit(double logit, double temperature, Rng& rng);

struct ElboLog {
  std::vector<double> elbo;  // per-step minibatch estimate
};

// One latent/graph/transition draw through the full objective with fixed
// noise. loss is the negative ELBO contribution. relaxed_forward swaps the
// hard bits for their relaxed surrogates, making the whole path
// differentiable so the gradients can be finite-difference checked.
struct VariationalSampleGrads {
  GradientBundle infer, policy, recon;
  double loss = 0.0;
};
VariationalSampleGrads variational_sample_grads(const VariationalModel& model,
                                                const Eigen::VectorXd& u,
                                                const std::vector<double>& bit_uniforms,
                                                const Eigen::VectorXd& x, int action,
                                                bool relaxed_forward);

VariationalModel train_variational(const DemoSet& demos, const VariationalConfig& config,
                                   ElboLog* log = nullptr);

// Monte Carlo marginals of q(G_k) over latent draws.
std::vector<double> discovered_prior(const VariationalModel& model, int mc_samples,
                                     std::uint64_t seed);

void save_variational(const VariationalModel& model, const std::string& path);
VariationalModel load_variational(const std::string& path);

// Windowed trend check: means over blocks of the given size count as
// non-decreasing when a step down stays within noise_scale standard errors
// of the two window means. True when at least min_fraction of steps do.
bool elbo_non_decreasing(const std::vector<double>& elbo, int window = 10,
                         double min_fraction = 0.9, double noise_scale = 2.0);

}  // namespace causim
