#include "causim/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "causim/parallel.hpp"

namespace causim {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double tv(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

std::vector<double> random_simplex(int card, Rng& rng, double floor_mass) {
  std::vector<double> p(static_cast<std::size_t>(card));
  double z = 0.0;
  for (double& v : p) {
    v = floor_mass + rng.uniform01();
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace

int TabularFCM::masked_index(const std::vector<int>& x_assignment) const {
  int idx = 0;
  int radix = 1;
  for (int i = 0; i < n; ++i) {
    const int v = graph.bit(i) ? x_assignment[static_cast<std::size_t>(i)] : 0;
    idx += v * radix;
    radix *= state_cardinality;
  }
  return idx;
}

std::vector<double> interventional_query(const TabularFCM& fcm,
                                         const std::vector<int>& x_assignment) {
  if (static_cast<int>(x_assignment.size()) != fcm.n)
    throw std::domain_error("assignment must cover all state variables");
  for (int v : x_assignment)
    if (v < 0 || v >= fcm.state_cardinality)
      throw std::domain_error("assignment value outside the variable domain");
  return fcm.action_table[static_cast<std::size_t>(fcm.masked_index(x_assignment))];
}

TabularFCM random_faithful_fcm(int n, const CausalGraph& graph, Rng& rng) {
  if (graph.size() != n) throw std::invalid_argument("graph size must equal n");
  TabularFCM fcm;
  fcm.n = n;
  fcm.graph = graph;
  fcm.z_cardinality = 3;
  fcm.state_cardinality = 2;
  fcm.action_cardinality = 3;

  fcm.state_tables.resize(static_cast<std::size_t>(n));
  for (auto& table : fcm.state_tables) {
    table.resize(static_cast<std::size_t>(fcm.z_cardinality));
    for (auto& row : table) row = random_simplex(fcm.state_cardinality, rng, 0.15);
  }

  int total = 1;
  for (int i = 0; i < n; ++i) total *= fcm.state_cardinality;

  const int resample_cap = 100;
  for (int attempt = 0; attempt < resample_cap; ++attempt) {
    fcm.action_table.assign(static_cast<std::size_t>(total), {});
    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    for (int idx = 0; idx < total; ++idx) {
      int rem = idx;
      for (int i = 0; i < n; ++i) {
        assignment[static_cast<std::size_t>(i)] = rem % fcm.state_cardinality;
        rem /= fcm.state_cardinality;
      }
      const int canon = fcm.masked_index(assignment);
      if (canon == idx)
        fcm.action_table[static_cast<std::size_t>(idx)] =
            random_simplex(fcm.action_cardinality, rng, 0.05);
    }
    // Non-canonical rows mirror their masked representative.
    for (int idx = 0; idx < total; ++idx) {
      int rem = idx;
      for (int i = 0; i < n; ++i) {
        assignment[static_cast<std::size_t>(i)] = rem % fcm.state_cardinality;
        rem /= fcm.state_cardinality;
      }
      const int canon = fcm.masked_index(assignment);
      if (canon != idx)
        fcm.action_table[static_cast<std::size_t>(idx)] =
            fcm.action_table[static_cast<std::size_t>(canon)];
    }

    // Faithfulness: every parent must move the action distribution in some
    // context of the other parents.
    bool faithful = true;
    for (int i = 0; i < n && faithful; ++i) {
      if (!graph.bit(i)) continue;
      bool moved = false;
      std::vector<int> ctx(static_cast<std::size_t>(n), 0);
      for (int c = 0; c < total && !moved; ++c) {
        int rem = c;
        for (int j = 0; j < n; ++j) {
          ctx[static_cast<std::size_t>(j)] = rem % fcm.state_cardinality;
          rem /= fcm.state_cardinality;
        }
        if (ctx[static_cast<std::size_t>(i)] != 0) continue;
        std::vector<int> flipped = ctx;
        for (int v = 1; v < fcm.state_cardinality && !moved; ++v) {
          flipped[static_cast<std::size_t>(i)] = v;
          moved = tv(interventional_query(fcm, ctx), interventional_query(fcm, flipped)) > 0.05;
        }
      }
      faithful = moved;
    }
    if (faithful) return fcm;
  }
  throw std::runtime_error("could not sample a faithful action table within the resample cap");
}

bool proposition_check(int n, Rng& rng, std::string* failure) {
  if (n < 1 || n > 4) throw std::invalid_argument("proposition check supports 1 <= n <= 4");
  const std::uint64_t graphs = 1ull << n;
  std::vector<TabularFCM> fcms;
  for (std::uint64_t gi = 0; gi < graphs; ++gi)
    fcms.push_back(random_faithful_fcm(n, CausalGraph::from_index(gi, n), rng));

  int total = 1;
  for (int i = 0; i < n; ++i) total *= fcms.front().state_cardinality;
  std::vector<std::vector<int>> assignments;
  for (int idx = 0; idx < total; ++idx) {
    std::vector<int> a(static_cast<std::size_t>(n));
    int rem = idx;
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = rem % fcms.front().state_cardinality;
      rem /= fcms.front().state_cardinality;
    }
    assignments.push_back(a);
  }

  for (std::uint64_t g1 = 0; g1 < graphs; ++g1) {
    // Reflexivity: identical models agree everywhere.
    for (const auto& a : assignments) {
      if (tv(interventional_query(fcms[g1], a), interventional_query(fcms[g1], a)) > 1e-12) {
        if (failure) *failure = "model disagrees with itself";
        return false;
      }
    }
    for (std::uint64_t g2 = g1 + 1; g2 < graphs; ++g2) {
      bool disagree = false;
      for (const auto& a : assignments)
        if (tv(interventional_query(fcms[g1], a), interventional_query(fcms[g2], a)) > 1e-9) {
          disagree = true;
          break;
        }
      if (!disagree) {
        if (failure)
          *failure = "graphs " + CausalGraph::from_index(g1, n).to_string() + " and " +
                     CausalGraph::from_index(g2, n).to_string() +
                     " agree on every interventional query";
        return false;
      }
    }
  }
  return true;
}

std::vector<MISample> mi_samples_from_demos(const DemoSet& demos) {
  std::vector<MISample> out;
  for (std::size_t i = 1; i < demos.transitions.size(); ++i) {
    const Transition& prev = demos.transitions[i - 1];
    const Transition& cur = demos.transitions[i];
    if (prev.episode_id != cur.episode_id || cur.t != prev.t + 1) continue;
    MISample s;
    s.x = cur.x;
    s.a = cur.action;
    s.z = Eigen::VectorXd(4);
    s.z.head(3) = prev.x;
    s.z(3) = static_cast<double>(prev.action - 1);
    out.push_back(s);
  }
  return out;
}

namespace {

struct MIData {
  std::vector<double> x;           // continuous coordinate under study
  std::vector<int> a;              // discrete action
  std::vector<Eigen::VectorXd> z;  // conditioning block (may be empty)
};

void zscore(std::vector<double>& v) {
  double m = 0.0;
  for (double t : v) m += t;
  m /= static_cast<double>(v.size());
  double s2 = 0.0;
  for (double t : v) s2 += (t - m) * (t - m);
  const double s = std::sqrt(s2 / static_cast<double>(v.size() - 1));
  if (s > 1e-12)
    for (double& t : v) t = (t - m) / s;
}

// psi(m) for integer m via harmonic numbers.
std::vector<double> digamma_table(int max_arg) {
  std::vector<double> psi(static_cast<std::size_t>(max_arg) + 1, 0.0);
  double h = 0.0;
  for (int m = 1; m <= max_arg; ++m) {
    psi[static_cast<std::size_t>(m)] = -kEulerGamma + h;
    h += 1.0 / static_cast<double>(m);
  }
  return psi;
}

// Marginal I(X; A) with A discrete: for each point, take the k-th nearest
// neighbor among points sharing its action, then count how many points of
// any action fall inside that radius. Exact duplicates in X collapse the
// radius to zero, where the counts switch to tie counts and the expression
// reduces to the plug-in discrete estimate.
double knn_mi_marginal(const MIData& data, int k) {
  const int N = static_cast<int>(data.x.size());
  const std::vector<double> psi = digamma_table(N + 1);
  std::vector<double> xi(static_cast<std::size_t>(N), 0.0);

  parallel_for(N, [&](int i) {
    const double x_i = data.x[static_cast<std::size_t>(i)];
    const int a_i = data.a[static_cast<std::size_t>(i)];
    std::vector<double> same;
    same.reserve(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      if (data.a[static_cast<std::size_t>(j)] == a_i)
        same.push_back(std::abs(data.x[static_cast<std::size_t>(j)] - x_i));
    }
    if (same.empty()) return;
    const int k_i = std::min<int>(k, static_cast<int>(same.size()));
    std::nth_element(same.begin(), same.begin() + (k_i - 1), same.end());
    const double d = same[static_cast<std::size_t>(k_i - 1)];

    int ktilde = k_i;
    if (d == 0.0) {
      ktilde = 0;
      for (double v : same)
        if (v == 0.0) ++ktilde;
    }
    int m = 0;
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      if (std::abs(data.x[static_cast<std::size_t>(j)] - x_i) <= d) ++m;
    }
    const int n_a = static_cast<int>(same.size()) + 1;
    xi[static_cast<std::size_t>(i)] =
        psi[static_cast<std::size_t>(N)] - psi[static_cast<std::size_t>(n_a)] +
        psi[static_cast<std::size_t>(ktilde)] - psi[static_cast<std::size_t>(m)];
  });

  double total = 0.0;
  for (double v : xi) total += v;
  const double nats = total / static_cast<double>(N);
  return std::max(nats / std::log(2.0), 0.0);
}

// Conditional I(X; A | Z): radius from the k-th neighbor in the full joint
// space with l-infinity distances, the discrete action contributing 0 for a
// match and 1 otherwise, and tie-adaptive counts when the radius collapses.
double knn_mi_conditional(const MIData& data, int k) {
  const int N = static_cast<int>(data.x.size());
  const int zdim = static_cast<int>(data.z.front().size());
  const std::vector<double> psi = digamma_table(N + 1);
  std::vector<double> xi(static_cast<std::size_t>(N));

  parallel_for(N, [&](int i) {
    std::vector<double> joint(static_cast<std::size_t>(N),
                              std::numeric_limits<double>::infinity());
    std::vector<double> dx(static_cast<std::size_t>(N)), dz(static_cast<std::size_t>(N));
    std::vector<double> da(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      const double ddx = std::abs(data.x[static_cast<std::size_t>(j)] -
                                  data.x[static_cast<std::size_t>(i)]);
      const double dda = data.a[static_cast<std::size_t>(j)] == data.a[static_cast<std::size_t>(i)]
                             ? 0.0
                             : 1.0;
      double ddz = 0.0;
      for (int d = 0; d < zdim; ++d)
        ddz = std::max(ddz, std::abs(data.z[static_cast<std::size_t>(j)](d) -
                                     data.z[static_cast<std::size_t>(i)](d)));
      dx[static_cast<std::size_t>(j)] = ddx;
      da[static_cast<std::size_t>(j)] = dda;
      dz[static_cast<std::size_t>(j)] = ddz;
      joint[static_cast<std::size_t>(j)] = std::max({ddx, dda, ddz});
    }

    std::vector<double> sorted = joint;
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    const double rho = sorted[static_cast<std::size_t>(k - 1)];

    int ktilde = 0;
    if (rho == 0.0) {
      for (int j = 0; j < N; ++j)
        if (j != i && joint[static_cast<std::size_t>(j)] == 0.0) ++ktilde;
    } else {
      ktilde = k;
    }

    int nxz = 0, naz = 0, nz = 0;
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      const double zdist = dz[static_cast<std::size_t>(j)];
      if (std::max(dx[static_cast<std::size_t>(j)], zdist) <= rho) ++nxz;
      if (std::max(da[static_cast<std::size_t>(j)], zdist) <= rho) ++naz;
      if (zdist <= rho) ++nz;
    }
    xi[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(ktilde)] -
                                      std::log(static_cast<double>(nxz + 1)) -
                                      std::log(static_cast<double>(naz + 1)) +
                                      std::log(static_cast<double>(nz + 1));
  });

  double total = 0.0;
  for (double v : xi) total += v;
  const double nats = total / static_cast<double>(N);
  return std::max(nats / std::log(2.0), 0.0);
}

}  // namespace

double estimate_mi(const std::vector<MISample>& samples, int dim, bool conditional, int k) {
  if (samples.size() <= static_cast<std::size_t>(k))
    throw std::invalid_argument("mutual information needs more samples than k");
  MIData data;
  data.x.reserve(samples.size());
  data.a.reserve(samples.size());
  for (const MISample& s : samples) {
    data.x.push_back(s.x(dim));
    data.a.push_back(s.a);
  }
  zscore(data.x);
  if (conditional) {
    const int zdim = static_cast<int>(samples.front().z.size());
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(zdim));
    for (int d = 0; d < zdim; ++d) {
      cols[static_cast<std::size_t>(d)].reserve(samples.size());
      for (const MISample& s : samples) cols[static_cast<std::size_t>(d)].push_back(s.z(d));
      zscore(cols[static_cast<std::size_t>(d)]);
    }
    data.z.resize(samples.size(), Eigen::VectorXd(zdim));
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (int d = 0; d < zdim; ++d) data.z[i](d) = cols[static_cast<std::size_t>(d)][i];
  }
  return conditional ? knn_mi_conditional(data, k) : knn_mi_marginal(data, k);
}

std::vector<MIReportRow> mi_report(const std::vector<MISample>& samples, int k) {
  const int n = static_cast<int>(samples.front().x.size());
  std::vector<MIReportRow> rows(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    rows[static_cast<std::size_t>(d)].dim = d;
    rows[static_cast<std::size_t>(d)].marginal_mi_bits = estimate_mi(samples, d, false, k);
    rows[static_cast<std::size_t>(d)].conditional_mi_bits = estimate_mi(samples, d, true, k);
  }
  return rows;
}

void write_mi_report(const std::vector<MIReportRow>& rows, std::ostream& out) {
  out << "dim,marginal_mi_bits,conditional_mi_bits\n" << std::setprecision(17);
  for (const auto& r : rows)
    out << r.dim << ',' << r.marginal_mi_bits << ',' << r.conditional_mi_bits << '\n';
}

void write_mi_report(const std::vector<MIReportRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_mi_report(rows, out);
}

GumbelBit gumbel_bit(double logit, double temperature, Rng& rng) {
  double u = rng.uniform01();
  u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
  const double s = logit + std::log(u / (1.0 - u));
  GumbelBit bit;
  bit.relaxed = sigmoid(s / temperature);
  bit.hard = s > 0.0 ? 1.0 : 0.0;
  return bit;
}

VariationalSampleGrads variational_sample_grads(const VariationalModel& model,
                                                const Eigen::VectorXd& u,
                                                const std::vector<double>& bit_uniforms,
                                                const Eigen::VectorXd& x, int action,
                                                bool relaxed_forward) {
  const int n = model.n;
  VariationalSampleGrads out;

  const Eigen::VectorXd logits = forward(model.infer_net, u);
  Eigen::VectorXd g(n), relaxed(n), p(n);
  for (int k = 0; k < n; ++k) {
    double uu = std::min(std::max(bit_uniforms[static_cast<std::size_t>(k)], 1e-12), 1.0 - 1e-12);
    const double s = logits(k) + std::log(uu / (1.0 - uu));
    relaxed(k) = sigmoid(s / model.gumbel_tau);
    const double hard = s > 0.0 ? 1.0 : 0.0;
    g(k) = relaxed_forward ? relaxed(k) : hard;
    p(k) = sigmoid(logits(k));
  }

  Eigen::VectorXd policy_in(2 * n);
  for (int k = 0; k < n; ++k) {
    policy_in(k) = x(k) * g(k);
    policy_in(n + k) = g(k);
  }
  out.policy = backward(model.policy.net, policy_in, action, LossKind::kCrossEntropy);
  const double ce = out.policy.loss;

  out.recon = backward(model.recon_net, g, u, LossKind::kMse);
  const double recon_loss = out.recon.loss;

  double prior_term = 0.0, logq = 0.0;
  for (int k = 0; k < n; ++k) {
    prior_term += model.prior_strength * g(k);
    logq += g(k) * std::log(p(k)) + (1.0 - g(k)) * std::log(1.0 - p(k));
  }
  out.loss = ce + prior_term + logq + recon_loss;

  // Total derivative with respect to each sampled bit, then the chain back
  // through the relaxed sample into the inference logits. The direct
  // (g - p) piece is the derivative of log q at fixed g.
  Eigen::VectorXd dlogits(n);
  for (int k = 0; k < n; ++k) {
    const double dloss_dg = x(k) * out.policy.input_grad(k) + out.policy.input_grad(n + k) +
                            model.prior_strength + logits(k) + out.recon.input_grad(k);
    const double dchain = relaxed(k) * (1.0 - relaxed(k)) / model.gumbel_tau;
    dlogits(k) = (g(k) - p(k)) + dchain * dloss_dg;
  }
  out.infer = backward_output_grad(model.infer_net, u, dlogits);
  out.infer.loss = out.loss;
  return out;
}

VariationalModel train_variational(const DemoSet& demos, const VariationalConfig& config,
                                   ElboLog* log) {
  if (demos.transitions.empty()) throw std::invalid_argument("demo set is empty");
  const int n = static_cast<int>(demos.transitions.front().x.size());

  VariationalModel model;
  model.n = n;
  model.latent_dim = config.latent_dim;
  model.prior_strength = config.prior_strength;
  model.gumbel_tau = config.gumbel_tau;

  Rng init_rng(derive_seed(config.seed, 11));
  {
    std::vector<int> sizes{config.latent_dim};
    for (int h : config.infer_hidden) sizes.push_back(h);
    sizes.push_back(n);
    model.infer_net = Network::glorot(sizes, Activation::kTanh, OutputHead::kLinear, init_rng);
  }
  {
    std::vector<int> sizes{2 * n};
    for (int h : config.policy_hidden) sizes.push_back(h);
    sizes.push_back(3);
    model.policy.n = n;
    model.policy.net =
        Network::glorot(sizes, Activation::kTanh, OutputHead::kSoftmax, init_rng);
  }
  {
    std::vector<int> sizes{n};
    for (int h : config.recon_hidden) sizes.push_back(h);
    sizes.push_back(config.latent_dim);
    model.recon_net = Network::glorot(sizes, Activation::kTanh, OutputHead::kLinear, init_rng);
  }

  OptimizerConfig opt_cfg;
  opt_cfg.learning_rate = config.learning_rate;
  OptimizerState opt_infer = OptimizerState::zeros_like(model.infer_net);
  OptimizerState opt_policy = OptimizerState::zeros_like(model.policy.net);
  OptimizerState opt_recon = OptimizerState::zeros_like(model.recon_net);

  Rng rng(derive_seed(config.seed, 12));
  const std::size_t count = demos.transitions.size();

  for (int stepi = 0; stepi < config.steps; ++stepi) {
    GradientBundle acc_i = GradientBundle::zeros_like(model.infer_net);
    GradientBundle acc_p = GradientBundle::zeros_like(model.policy.net);
    GradientBundle acc_r = GradientBundle::zeros_like(model.recon_net);
    double loss = 0.0;
    for (int b = 0; b < config.batch_size; ++b) {
      Eigen::VectorXd u(config.latent_dim);
      for (int d = 0; d < config.latent_dim; ++d) u(d) = rng.normal();
      std::vector<double> uniforms(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) uniforms[static_cast<std::size_t>(k)] = rng.uniform01();
      const Transition& tr = demos.transitions[rng.next_below(count)];
      VariationalSampleGrads g =
          variational_sample_grads(model, u, uniforms, tr.x, tr.action, false);
      acc_i.accumulate(g.infer);
      acc_p.accumulate(g.policy);
      acc_r.accumulate(g.recon);
      loss += g.loss;
    }
    const double scale = 1.0 / static_cast<double>(config.batch_size);
    acc_i.scale(scale);
    acc_p.scale(scale);
    acc_r.scale(scale);
    loss *= scale;
    if (!std::isfinite(loss))
      throw std::runtime_error("variational training diverged at step " + std::to_string(stepi));
    step(model.infer_net, acc_i, opt_infer, opt_cfg);
    step(model.policy.net, acc_p, opt_policy, opt_cfg);
    step(model.recon_net, acc_r, opt_recon, opt_cfg);
    if (log) log->elbo.push_back(-loss);
  }
  return model;
}

std::vector<double> discovered_prior(const VariationalModel& model, int mc_samples,
                                     std::uint64_t seed) {
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  Rng rng(seed);
  std::vector<double> marginals(static_cast<std::size_t>(model.n), 0.0);
  for (int s = 0; s < mc_samples; ++s) {
    Eigen::VectorXd u(model.latent_dim);
    for (int d = 0; d < model.latent_dim; ++d) u(d) = rng.normal();
    const Eigen::VectorXd logits = forward(model.infer_net, u);
    for (int k = 0; k < model.n; ++k)
      marginals[static_cast<std::size_t>(k)] += sigmoid(logits(k));
  }
  for (double& m : marginals) m /= static_cast<double>(mc_samples);
  return marginals;
}

void save_variational(const VariationalModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "variational 1\n";
  out << "n " << model.n << '\n';
  out << "latent_dim " << model.latent_dim << '\n';
  out << std::setprecision(17);
  out << "prior_strength " << model.prior_strength << '\n';
  out << "gumbel_tau " << model.gumbel_tau << '\n';
  save_network(model.infer_net, out);
  save_network(model.policy.net, out);
  save_network(model.recon_net, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

VariationalModel load_variational(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic, key;
  int version = 0;
  in >> magic >> version;
  if (magic != "variational" || version != 1)
    throw std::runtime_error("not a variational checkpoint");
  VariationalModel model;
  in >> key >> model.n;
  in >> key >> model.latent_dim;
  in >> key >> model.prior_strength;
  in >> key >> model.gumbel_tau;
  if (!in) throw std::runtime_error("truncated variational checkpoint");
  model.infer_net = load_network(in);
  model.policy.n = model.n;
  model.policy.net = load_network(in);
  model.recon_net = load_network(in);
  return model;
}

bool elbo_non_decreasing(const std::vector<double>& elbo, int window, double min_fraction,
                         double noise_scale) {
  if (static_cast<int>(elbo.size()) < 2 * window) return false;
  std::vector<double> means, sems;
  for (std::size_t lo = 0; lo + static_cast<std::size_t>(window) <= elbo.size();
       lo += static_cast<std::size_t>(window)) {
    double m = 0.0;
    for (int i = 0; i < window; ++i) m += elbo[lo + static_cast<std::size_t>(i)];
    m /= window;
    double s2 = 0.0;
    for (int i = 0; i < window; ++i) {
      const double d = elbo[lo + static_cast<std::size_t>(i)] - m;
      s2 += d * d;
    }
    means.push_back(m);
    sems.push_back(std::sqrt(s2 / (window - 1) / window));
  }
  int ok = 0;
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double tol =
        noise_scale * std::sqrt(sems[i] * sems[i] + sems[i - 1] * sems[i - 1]) + 1e-9;
    if (means[i] - means[i - 1] >= -tol) ++ok;
  }
  return static_cast<double>(ok) >= min_fraction * static_cast<double>(means.size() - 1);
}

}  // namespace causim
