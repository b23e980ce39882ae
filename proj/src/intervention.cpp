#include "causim/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "causim/stats.hpp"

namespace causim {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Z-scores the raw scores over the whole trace; degenerate spread falls back
// to centering only.
std::vector<InterventionRecord> standardized(const std::vector<InterventionRecord>& raw) {
  std::vector<double> scores;
  scores.reserve(raw.size());
  for (const auto& r : raw) scores.push_back(r.score);
  const double m = mean(scores);
  double s = stddev(scores);
  if (!(s > 1e-12)) s = 1.0;
  std::vector<InterventionRecord> out = raw;
  for (auto& r : out) r.score = (r.score - m) / s;
  return out;
}

Eigen::VectorXd mix_probs(const GraphPolicy& policy, const Eigen::VectorXd& x,
                          const EnergyModel& em) {
  const int n = em.size();
  const std::vector<double> p = enumerate_energy_distribution(em);
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(policy.net.output_size());
  for (std::size_t gi = 0; gi < p.size(); ++gi) {
    if (p[gi] == 0.0) continue;
    const CausalGraph g = CausalGraph::from_index(gi, n);
    mix += p[gi] * forward(policy.net, masked_input(x, g));
  }
  return mix;
}

double kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    d += p(i) * std::log(p(i) / q(i));
  }
  return d;
}

struct FitState {
  std::vector<InterventionRecord> records;
  EnergyModel em;
  double raw_mean = 0.0;
  double raw_std = 1.0;

  void refit(double ridge, double tau) {
    std::vector<double> scores;
    for (const auto& r : records) scores.push_back(r.score);
    raw_mean = mean(scores);
    raw_std = stddev(scores);
    if (!(raw_std > 1e-12)) raw_std = 1.0;
    em = fit_energy(standardized(records), ridge, tau);
  }

  InterventionTraceRow trace_row(const InterventionRecord& rec) const {
    InterventionTraceRow row;
    row.episode_index = rec.episode_index;
    row.graph = rec.graph;
    row.raw_score = rec.score;
    row.standardized_score = (rec.score - raw_mean) / raw_std;
    row.w = em.w;
    row.b = em.b;
    row.mode_bits = mode_graph(em);
    double pred = em.b;
    for (int i = 0; i < em.size(); ++i)
      if (row.mode_bits.bit(i)) pred += em.w(i);
    row.mode_return_estimate = raw_mean + raw_std * pred;
    return row;
  }
};

}  // namespace

EnergyModel EnergyModel::uniform(int n, double tau) {
  EnergyModel em;
  em.w = Eigen::VectorXd::Zero(n);
  em.b = 0.0;
  em.tau = tau;
  return em;
}

double bit_probability(const EnergyModel& em, int i) { return sigmoid(em.w(i) / em.tau); }

EnergyModel energy_from_prior(const std::vector<double>& marginals, double tau) {
  if (marginals.empty()) throw std::invalid_argument("prior marginals are empty");
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  EnergyModel em;
  em.tau = tau;
  em.w = Eigen::VectorXd(static_cast<Eigen::Index>(marginals.size()));
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    const double q = std::min(std::max(marginals[i], 1e-9), 1.0 - 1e-9);
    em.w(static_cast<Eigen::Index>(i)) = tau * std::log(q / (1.0 - q));
  }
  return em;
}

CausalGraph sample_graph(const EnergyModel& em, Rng& rng) {
  CausalGraph g = CausalGraph::all_zeros(em.size());
  for (int i = 0; i < em.size(); ++i) g.bits[i] = rng.bernoulli(bit_probability(em, i));
  return g;
}

CausalGraph mode_graph(const EnergyModel& em) {
  CausalGraph g = CausalGraph::all_zeros(em.size());
  for (int i = 0; i < em.size(); ++i) g.bits[i] = em.w(i) > 0.0;
  return g;
}

std::vector<double> enumerate_energy_distribution(const EnergyModel& em) {
  const int n = em.size();
  if (n > 12) throw std::invalid_argument("enumeration limited to n <= 12");
  const std::size_t count = 1ull << n;
  std::vector<double> p(count);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t gi = 0; gi < count; ++gi) {
    double e = 0.0;
    for (int i = 0; i < n; ++i)
      if (gi & (1ull << i)) e += em.w(i);
    p[gi] = e / em.tau;
    best = std::max(best, p[gi]);
  }
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - best);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

EnergyModel fit_energy(const std::vector<InterventionRecord>& records, double ridge, double tau) {
  if (records.empty()) throw std::invalid_argument("fit_energy needs at least one record");
  const int n = records.front().graph.size();
  const int m = static_cast<int>(records.size());
  Eigen::MatrixXd X(m, n + 1);
  Eigen::VectorXd y(m);
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i < n; ++i) X(r, i) = records[static_cast<std::size_t>(r)].graph.bit(i);
    X(r, n) = 1.0;
    y(r) = records[static_cast<std::size_t>(r)].score;
  }
  Eigen::MatrixXd a = X.transpose() * X;
  for (int i = 0; i < n; ++i) a(i, i) += ridge;  // intercept stays unpenalized
  a(n, n) += 1e-12;
  const Eigen::VectorXd theta = a.ldlt().solve(X.transpose() * y);
  EnergyModel em;
  em.w = theta.head(n);
  em.b = theta(n);
  em.tau = tau;
  return em;
}

std::vector<double> exact_posterior(const std::vector<double>& likelihood,
                                    const std::vector<double>& prior) {
  if (likelihood.size() != prior.size() || likelihood.empty())
    throw std::invalid_argument("posterior needs matching nonempty score and prior tables");
  std::vector<double> post(likelihood.size());
  double z = 0.0;
  for (std::size_t i = 0; i < post.size(); ++i) {
    post[i] = likelihood[i] * prior[i];
    if (!std::isfinite(post[i]) || post[i] < 0.0)
      throw std::runtime_error("numeric error: invalid posterior mass at graph " +
                               std::to_string(i));
    z += post[i];
  }
  if (!(z > 0.0)) throw std::runtime_error("numeric error: posterior has zero total mass");
  for (double& v : post) v /= z;
  return post;
}

InterventionResult policy_execution_intervention(const GraphPolicy& policy,
                                                 const Scenario& scenario, int episodes,
                                                 const EnergyModel& em0, std::uint64_t seed,
                                                 const InterventionConfig& config) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  Rng graph_rng(derive_seed(seed, 0));
  FitState fit;
  fit.em = em0;

  InterventionResult result;
  for (int ep = 0; ep < episodes; ++ep) {
    const double t = episodes > 1 ? static_cast<double>(ep) / (episodes - 1) : 0.0;
    fit.em.tau = lerp(config.tau_start, config.tau_end, t);
    const CausalGraph g = sample_graph(fit.em, graph_rng);

    const Actor actor = [&policy, &g](const CoreState&, const Eigen::Vector3d& x) {
      return policy_act(policy, x, g);
    };
    const double ret = run_episode(scenario, actor, derive_seed(seed, 1000 + ep)).total_reward;

    InterventionRecord rec;
    rec.graph = g;
    rec.score = ret;
    rec.episode_index = ep;
    fit.records.push_back(rec);
    fit.refit(config.ridge, fit.em.tau);
    result.trace.push_back(fit.trace_row(rec));
  }
  result.model = fit.em;
  result.mode = mode_graph(fit.em);
  return result;
}

double disagreement_score(const GraphPolicy& policy, const Eigen::VectorXd& x,
                          const EnergyModel& em, int sample_count, Rng& rng) {
  if (sample_count <= 0) {
    const int n = em.size();
    const std::vector<double> p = enumerate_energy_distribution(em);
    std::vector<Eigen::VectorXd> dists(p.size());
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(policy.net.output_size());
    for (std::size_t gi = 0; gi < p.size(); ++gi) {
      dists[gi] = forward(policy.net, masked_input(x, CausalGraph::from_index(gi, n)));
      mix += p[gi] * dists[gi];
    }
    double d = 0.0;
    for (std::size_t gi = 0; gi < p.size(); ++gi)
      if (p[gi] > 0.0) d += p[gi] * kl(dists[gi], mix);
    return d;
  }
  std::vector<Eigen::VectorXd> dists(static_cast<std::size_t>(sample_count));
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(policy.net.output_size());
  for (int s = 0; s < sample_count; ++s) {
    dists[static_cast<std::size_t>(s)] =
        forward(policy.net, masked_input(x, sample_graph(em, rng)));
    mix += dists[static_cast<std::size_t>(s)];
  }
  mix /= static_cast<double>(sample_count);
  double d = 0.0;
  for (const auto& dist : dists) d += kl(dist, mix);
  return d / static_cast<double>(sample_count);
}

InterventionResult expert_query_intervention(const GraphPolicy& policy, const Scenario& scenario,
                                             ExpertQuery& expert, int budget,
                                             const EnergyModel& em0, std::uint64_t seed,
                                             const InterventionConfig& config) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");

  // States come from closed-loop mixture execution under the prior.
  const Actor mix_actor = [&policy, &em0](const CoreState&, const Eigen::Vector3d& x) {
    const Eigen::VectorXd probs = mix_probs(policy, x, em0);
    int best = 0;
    for (int i = 1; i < probs.size(); ++i)
      if (probs(i) > probs(best)) best = i;
    return best;
  };
  std::vector<CoreState> states;
  std::vector<Eigen::Vector3d> obs;
  for (int ep = 0; ep < config.collect_episodes; ++ep) {
    const EpisodeTrace tr = run_episode(scenario, mix_actor, derive_seed(seed, 2000 + ep));
    states.insert(states.end(), tr.states.begin(), tr.states.end());
    obs.insert(obs.end(), tr.observations.begin(), tr.observations.end());
  }
  if (budget > static_cast<int>(states.size()))
    throw std::invalid_argument("query budget exceeds the " + std::to_string(states.size()) +
                                " collected states");

  std::vector<int> order(states.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rank_rng(derive_seed(seed, 1));
  if (config.random_state_selection) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = rank_rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }
  } else {
    std::vector<double> scores(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
      scores[i] = disagreement_score(policy, obs[i], em0, config.disagreement_samples, rank_rng);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](int a, int b) { return scores[a] > scores[b]; });
  }

  std::vector<Eigen::Vector3d> labeled_x;
  std::vector<int> labels;
  for (int q = 0; q < budget; ++q) {
    const int idx = order[static_cast<std::size_t>(q)];
    labeled_x.push_back(obs[static_cast<std::size_t>(idx)]);
    labels.push_back(expert.query(states[static_cast<std::size_t>(idx)]));
  }

  Rng graph_rng(derive_seed(seed, 3));
  FitState fit;
  fit.em = em0;
  InterventionResult result;
  for (int it = 0; it < config.graph_samples; ++it) {
    const double t = config.graph_samples > 1
                         ? static_cast<double>(it) / (config.graph_samples - 1)
                         : 0.0;
    fit.em.tau = lerp(config.tau_start, config.tau_end, t);
    const CausalGraph g = sample_graph(fit.em, graph_rng);
    double loss = 0.0;
    for (std::size_t q = 0; q < labels.size(); ++q)
      loss += cross_entropy(forward(policy.net, masked_input(labeled_x[q], g)),
                            labels[q]);
    loss /= static_cast<double>(labels.size());

    InterventionRecord rec;
    rec.graph = g;
    rec.score = -loss;
    rec.episode_index = it;
    fit.records.push_back(rec);
    fit.refit(config.ridge, fit.em.tau);
    result.trace.push_back(fit.trace_row(rec));
  }
  result.model = fit.em;
  result.mode = mode_graph(fit.em);
  return result;
}

void write_trace(const std::vector<InterventionTraceRow>& trace, std::ostream& out) {
  if (trace.empty()) throw std::invalid_argument("trace is empty");
  const int n = trace.front().graph.size();
  out << "episode_index,graph_bits,raw_score,standardized_score";
  for (int i = 1; i <= n; ++i) out << ",w_" << i;
  out << ",b,mode_bits,mode_return_estimate\n";
  out << std::setprecision(17);
  for (const auto& row : trace) {
    out << row.episode_index << ',' << row.graph.to_string() << ',' << row.raw_score << ','
        << row.standardized_score;
    for (int i = 0; i < n; ++i) out << ',' << row.w(i);
    out << ',' << row.b << ',' << row.mode_bits.to_string() << ',' << row.mode_return_estimate
        << '\n';
  }
}

void write_trace(const std::vector<InterventionTraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_trace(trace, out);
}

std::vector<InterventionTraceRow> read_trace(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty trace file");
  std::vector<std::string> cols;
  {
    std::stringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 7 || cols[0] != "episode_index" || cols[1] != "graph_bits")
    throw std::runtime_error("not an intervention trace (bad header)");
  const int n = static_cast<int>(cols.size()) - 7;

  std::vector<InterventionTraceRow> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<std::string> f;
    std::string c;
    while (std::getline(ls, c, ',')) f.push_back(c);
    if (static_cast<int>(f.size()) != static_cast<int>(cols.size()))
      throw std::runtime_error("trace row has wrong field count");
    InterventionTraceRow row;
    row.episode_index = std::stoi(f[0]);
    row.graph = CausalGraph::from_string(f[1]);
    row.raw_score = std::stod(f[2]);
    row.standardized_score = std::stod(f[3]);
    row.w = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) row.w(i) = std::stod(f[static_cast<std::size_t>(4 + i)]);
    row.b = std::stod(f[static_cast<std::size_t>(4 + n)]);
    row.mode_bits = CausalGraph::from_string(f[static_cast<std::size_t>(5 + n)]);
    row.mode_return_estimate = std::stod(f[static_cast<std::size_t>(6 + n)]);
    trace.push_back(row);
  }
  if (trace.empty()) throw std::runtime_error("trace file holds no rows");
  return trace;
}

std::vector<InterventionTraceRow> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_trace(in);
}

CausalGraph replay_trace(const std::vector<InterventionTraceRow>& trace, double ridge,
                         double tau) {
  if (trace.empty()) throw std::invalid_argument("trace is empty");
  std::vector<InterventionRecord> records;
  for (const auto& row : trace) {
    InterventionRecord rec;
    rec.graph = row.graph;
    rec.score = row.raw_score;
    rec.episode_index = row.episode_index;
    records.push_back(rec);
  }
  return mode_graph(fit_energy(standardized(records), ridge, tau));
}

}  // namespace causim
