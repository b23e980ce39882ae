#include "causim/policy.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "causim/parallel.hpp"

namespace causim {

namespace {

// Builds network input columns for one minibatch. For mixture training each
// sample gets a fresh uniform graph; plain cloning passes x through.
struct BatchBuilder {
  int n = 0;
  bool mixture = false;
  std::vector<bool>* seen = nullptr;

  Eigen::MatrixXd operator()(const std::vector<Transition>& data, const std::vector<int>& idx,
                             std::size_t lo, std::size_t hi, Rng& rng) const {
    const int in_dim = mixture ? 2 * n : n;
    Eigen::MatrixXd cols(in_dim, static_cast<Eigen::Index>(hi - lo));
    for (std::size_t s = lo; s < hi; ++s) {
      const Transition& tr = data[static_cast<std::size_t>(idx[s])];
      const Eigen::Index c = static_cast<Eigen::Index>(s - lo);
      if (mixture) {
        const std::uint64_t gi = rng.next_below(1ull << n);
        if (seen) (*seen)[static_cast<std::size_t>(gi)] = true;
        const CausalGraph g = CausalGraph::from_index(gi, n);
        cols.col(c) = masked_input(tr.x, g);
      } else {
        cols.col(c) = tr.x;
      }
    }
    return cols;
  }
};

Network train_impl(const DemoSet& demos, const TrainConfig& config, bool mixture,
                   TrainingLog* log, const Network* init = nullptr) {
  if (demos.transitions.empty()) throw std::invalid_argument("demo set is empty");
  const int n = 3;
  const int in_dim = mixture ? 2 * n : n;

  std::vector<Transition> train, val;
  split_transitions(demos.transitions, config.val_fraction, derive_seed(config.seed, 9001),
                    &train, &val);
  if (train.empty()) train = demos.transitions;

  std::vector<int> sizes;
  sizes.push_back(in_dim);
  for (int h : config.hidden) sizes.push_back(h);
  sizes.push_back(3);

  Rng init_rng(derive_seed(config.seed, 1));
  Network net =
      init ? *init : Network::glorot(sizes, config.activation, OutputHead::kSoftmax, init_rng);
  if (init && net.layer_sizes.front() != in_dim)
    throw std::invalid_argument("initial network input size does not match the data");
  OptimizerState opt = OptimizerState::zeros_like(net);
  OptimizerConfig opt_cfg;
  opt_cfg.learning_rate = config.learning_rate;

  Rng order_rng(derive_seed(config.seed, 2));
  Rng graph_rng(derive_seed(config.seed, 3));

  std::vector<int> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);

  const std::size_t B = static_cast<std::size_t>(std::max(config.batch_size, 1));
  std::vector<bool> seen;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      const std::size_t j = order_rng.next_below(i);
      std::swap(idx[i - 1], idx[j]);
    }
    seen.assign(1ull << n, false);
    BatchBuilder build{n, mixture, &seen};

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < train.size(); lo += B) {
      const std::size_t hi = std::min(lo + B, train.size());
      Eigen::MatrixXd cols = build(train, idx, lo, hi, graph_rng);
      std::vector<int> targets;
      targets.reserve(hi - lo);
      for (std::size_t s = lo; s < hi; ++s)
        targets.push_back(train[static_cast<std::size_t>(idx[s])].action);
      GradientBundle g = backward_batch_ce(net, cols, targets);
      if (!std::isfinite(g.loss))
        throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
      epoch_loss += g.loss;
      ++batches;
      step(net, g, opt, opt_cfg);
    }
    if (mixture && train.size() >= 1000 && n <= 8) {
      for (std::size_t gi = 0; gi < seen.size(); ++gi)
        if (!seen[gi])
          throw std::logic_error("mixture sampler missed graph index " + std::to_string(gi) +
                                 " over a full epoch");
    }

    if (log) {
      double vloss = 0.0;
      if (!val.empty()) {
        Rng val_rng(derive_seed(config.seed, 5000 + static_cast<std::uint64_t>(epoch)));
        std::vector<int> vidx(val.size());
        for (std::size_t i = 0; i < vidx.size(); ++i) vidx[i] = static_cast<int>(i);
        BatchBuilder vbuild{n, mixture, nullptr};
        Eigen::MatrixXd cols = vbuild(val, vidx, 0, val.size(), val_rng);
        Eigen::MatrixXd probs = forward_batch(net, cols);
        for (std::size_t i = 0; i < val.size(); ++i)
          vloss += cross_entropy(probs.col(static_cast<Eigen::Index>(i)), val[i].action);
        vloss /= static_cast<double>(val.size());
      }
      log->epoch.push_back(epoch);
      log->train_loss.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(batches, 1)));
      log->val_loss.push_back(vloss);
    }
  }
  return net;
}

}  // namespace

void write_training_log(const TrainingLog& log, std::ostream& out) {
  out << "epoch,train_loss,val_loss\n" << std::setprecision(17);
  for (std::size_t i = 0; i < log.epoch.size(); ++i)
    out << log.epoch[i] << ',' << log.train_loss[i] << ',' << log.val_loss[i] << '\n';
}

void write_training_log(const TrainingLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_training_log(log, out);
}

Eigen::VectorXd masked_input(const Eigen::VectorXd& x, const CausalGraph& g) {
  if (x.size() != g.size()) throw std::invalid_argument("mask length does not match input length");
  const int n = g.size();
  Eigen::VectorXd out(2 * n);
  for (int i = 0; i < n; ++i) {
    out(i) = g.bit(i) ? x(i) : 0.0;
    out(n + i) = g.bit(i) ? 1.0 : 0.0;
  }
  return out;
}

GraphPolicy train_graph_policy(const DemoSet& demos, const TrainConfig& config, TrainingLog* log) {
  GraphPolicy p;
  p.n = 3;
  p.net = train_impl(demos, config, true, log);
  return p;
}

Network train_bc(const DemoSet& demos, const TrainConfig& config, TrainingLog* log) {
  return train_impl(demos, config, false, log);
}

Network train_bc_warm(const Network& init, const DemoSet& demos, const TrainConfig& config,
                      TrainingLog* log) {
  return train_impl(demos, config, false, log, &init);
}

int net_act(const Network& net, const Eigen::VectorXd& input) {
  const Eigen::VectorXd p = forward(net, input);
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p(i) > p(best)) best = i;
  return best;
}

int policy_act(const GraphPolicy& policy, const Eigen::Vector3d& x, const CausalGraph& g) {
  return net_act(policy.net, masked_input(x, g));
}

EvalResult evaluate_actor(const Actor& actor, const Scenario& scenario, int episodes,
                          std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  EvalResult res;
  res.returns.resize(static_cast<std::size_t>(episodes));
  parallel_for(episodes, [&](int ep) {
    res.returns[static_cast<std::size_t>(ep)] =
        run_episode(scenario, actor, derive_seed(seed, ep)).total_reward;
  });
  double sum = 0.0;
  for (double r : res.returns) sum += r;
  res.mean_return = sum / static_cast<double>(episodes);
  return res;
}

EvalResult eval_bc(const Network& net, const Scenario& scenario, int episodes,
                   std::uint64_t seed) {
  return evaluate_actor(
      [&net](const CoreState&, const Eigen::Vector3d& x) { return net_act(net, x); }, scenario,
      episodes, seed);
}

EvalResult eval_graph_policy(const GraphPolicy& policy, const CausalGraph& g,
                             const Scenario& scenario, int episodes, std::uint64_t seed) {
  return evaluate_actor(
      [&policy, &g](const CoreState&, const Eigen::Vector3d& x) { return policy_act(policy, x, g); },
      scenario, episodes, seed);
}

double policy_loss(const GraphPolicy& policy, const std::vector<Transition>& transitions,
                   const CausalGraph& g) {
  if (transitions.empty()) throw std::invalid_argument("no transitions");
  double total = 0.0;
  for (const Transition& tr : transitions)
    total += cross_entropy(forward(policy.net, masked_input(tr.x, g)), tr.action);
  return total / static_cast<double>(transitions.size());
}

double bc_loss(const Network& net, const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw std::invalid_argument("no transitions");
  double total = 0.0;
  for (const Transition& tr : transitions) total += cross_entropy(forward(net, tr.x), tr.action);
  return total / static_cast<double>(transitions.size());
}

double policy_accuracy(const GraphPolicy& policy, const std::vector<Transition>& transitions,
                       const CausalGraph& g) {
  if (transitions.empty()) throw std::invalid_argument("no transitions");
  int hits = 0;
  for (const Transition& tr : transitions) hits += policy_act(policy, tr.x, g) == tr.action;
  return static_cast<double>(hits) / static_cast<double>(transitions.size());
}

double bc_accuracy(const Network& net, const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw std::invalid_argument("no transitions");
  int hits = 0;
  for (const Transition& tr : transitions) hits += net_act(net, tr.x) == tr.action;
  return static_cast<double>(hits) / static_cast<double>(transitions.size());
}

void split_transitions(const std::vector<Transition>& all, double val_fraction,
                       std::uint64_t seed, std::vector<Transition>* train,
                       std::vector<Transition>* val) {
  std::vector<int> idx(all.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.next_below(i);
    std::swap(idx[i - 1], idx[j]);
  }
  const std::size_t n_val =
      static_cast<std::size_t>(val_fraction * static_cast<double>(all.size()));
  train->clear();
  val->clear();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Transition& tr = all[static_cast<std::size_t>(idx[i])];
    if (i + n_val < idx.size())
      train->push_back(tr);
    else
      val->push_back(tr);
  }
}

void save_graph_policy(const GraphPolicy& policy, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "mask_dim " << policy.n << '\n';
  save_network(policy.net, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

GraphPolicy load_graph_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string key;
  GraphPolicy p;
  in >> key >> p.n;
  if (key != "mask_dim" || p.n <= 0) throw std::runtime_error("not a graph-policy checkpoint");
  p.net = load_network(in);
  if (p.net.input_size() != 2 * p.n)
    throw std::runtime_error("graph-policy checkpoint has inconsistent input size");
  return p;
}

}  // namespace causim
