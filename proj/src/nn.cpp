#include "causim/nn.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace causim {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("network needs at least input and output layers");
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const double m = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - m).exp();
  return e / e.sum();
}

Eigen::MatrixXd softmax_cols(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) out.col(c) = softmax(z.col(c));
  return out;
}

Eigen::ArrayXd activate(const Eigen::ArrayXd& z, Activation a) {
  if (a == Activation::kTanh) return z.tanh();
  return z.max(0.0);
}

Eigen::ArrayXd activate_grad_from_out(const Eigen::ArrayXd& h, const Eigen::ArrayXd& z, Activation a) {
  if (a == Activation::kTanh) return 1.0 - h * h;
  return (z > 0.0).cast<double>();
}

// Forward pass keeping pre- and post-activation values per layer.
struct ForwardCache {
  std::vector<Eigen::VectorXd> pre;   // z_k, one per layer
  std::vector<Eigen::VectorXd> post;  // h_k after hidden activation (last entry post-head)
};

ForwardCache forward_cached(const Network& net, const Eigen::VectorXd& input) {
  if (input.size() != net.input_size())
    throw std::invalid_argument("input shape mismatch: expected " + std::to_string(net.input_size()) +
                                " values, got " + std::to_string(input.size()));
  ForwardCache cache;
  Eigen::VectorXd h = input;
  const int L = net.num_layers();
  for (int k = 0; k < L; ++k) {
    Eigen::VectorXd z = net.weights[k] * h + net.biases[k];
    cache.pre.push_back(z);
    if (k + 1 < L) {
      h = activate(z.array(), net.hidden_activation).matrix();
    } else {
      h = net.output_head == OutputHead::kSoftmax ? softmax(z) : z;
    }
    cache.post.push_back(h);
  }
  return cache;
}

// Shared backward walk given the gradient at the last pre-activation.
GradientBundle backprop_from_last_delta(const Network& net, const Eigen::VectorXd& input,
                                        const ForwardCache& cache, Eigen::VectorXd delta,
                                        double loss) {
  GradientBundle g = GradientBundle::zeros_like(net);
  g.loss = loss;
  const int L = net.num_layers();
  for (int k = L - 1; k >= 0; --k) {
    const Eigen::VectorXd& below = (k == 0) ? input : cache.post[k - 1];
    g.weight_grads[k] = delta * below.transpose();
    g.bias_grads[k] = delta;
    Eigen::VectorXd up = net.weights[k].transpose() * delta;
    if (k > 0) {
      up = (up.array() *
            activate_grad_from_out(cache.post[k - 1].array(), cache.pre[k - 1].array(),
                                   net.hidden_activation))
               .matrix();
    }
    delta = up;
  }
  g.input_grad = delta;
  return g;
}

constexpr const char* kNetworkMagic = "causim-network";

}  // namespace

std::string activation_name(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string output_head_name(OutputHead h) { return h == OutputHead::kLinear ? "linear" : "softmax"; }

OutputHead parse_output_head(const std::string& s) {
  if (s == "linear") return OutputHead::kLinear;
  if (s == "softmax") return OutputHead::kSoftmax;
  throw std::invalid_argument("unknown output head: " + s);
}

Network Network::zeros(std::vector<int> sizes, Activation act, OutputHead head) {
  check_sizes(sizes);
  Network net;
  net.layer_sizes = std::move(sizes);
  net.hidden_activation = act;
  net.output_head = head;
  for (std::size_t k = 0; k + 1 < net.layer_sizes.size(); ++k) {
    net.weights.emplace_back(Eigen::MatrixXd::Zero(net.layer_sizes[k + 1], net.layer_sizes[k]));
    net.biases.emplace_back(Eigen::VectorXd::Zero(net.layer_sizes[k + 1]));
  }
  return net;
}

Network Network::glorot(std::vector<int> sizes, Activation act, OutputHead head, Rng& rng) {
  Network net = zeros(std::move(sizes), act, head);
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(net.layer_sizes[k] + net.layer_sizes[k + 1]));
    for (Eigen::Index i = 0; i < net.weights[k].rows(); ++i)
      for (Eigen::Index j = 0; j < net.weights[k].cols(); ++j)
        net.weights[k](i, j) = rng.uniform(-bound, bound);
  }
  return net;
}

GradientBundle GradientBundle::zeros_like(const Network& net) {
  GradientBundle g;
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    g.weight_grads.emplace_back(Eigen::MatrixXd::Zero(net.weights[k].rows(), net.weights[k].cols()));
    g.bias_grads.emplace_back(Eigen::VectorXd::Zero(net.biases[k].size()));
  }
  g.input_grad = Eigen::VectorXd::Zero(net.input_size());
  return g;
}

void GradientBundle::accumulate(const GradientBundle& other) {
  for (std::size_t k = 0; k < weight_grads.size(); ++k) {
    weight_grads[k] += other.weight_grads[k];
    bias_grads[k] += other.bias_grads[k];
  }
  loss += other.loss;
  if (input_grad.size() == other.input_grad.size()) input_grad += other.input_grad;
}

void GradientBundle::scale(double factor) {
  for (std::size_t k = 0; k < weight_grads.size(); ++k) {
    weight_grads[k] *= factor;
    bias_grads[k] *= factor;
  }
  loss *= factor;
  input_grad *= factor;
}

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& input) {
  return forward_cached(net, input).post.back();
}

Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != net.input_size())
    throw std::invalid_argument("input shape mismatch in forward_batch");
  Eigen::MatrixXd h = inputs;
  const int L = net.num_layers();
  for (int k = 0; k < L; ++k) {
    Eigen::MatrixXd z = (net.weights[k] * h).colwise() + net.biases[k];
    if (k + 1 < L) {
      if (net.hidden_activation == Activation::kTanh)
        h = z.array().tanh().matrix();
      else
        h = z.array().max(0.0).matrix();
    } else {
      h = net.output_head == OutputHead::kSoftmax ? softmax_cols(z) : z;
    }
  }
  return h;
}

double cross_entropy(const Eigen::VectorXd& probs, int target_class) {
  if (target_class < 0 || target_class >= probs.size())
    throw std::invalid_argument("target class out of range");
  return -std::log(std::max(probs(target_class), std::numeric_limits<double>::min()));
}

GradientBundle backward(const Network& net, const Eigen::VectorXd& input, int target_class,
                        LossKind loss_kind) {
  if (loss_kind != LossKind::kCrossEntropy)
    throw std::invalid_argument("class targets require the cross_entropy loss");
  if (net.output_head != OutputHead::kSoftmax)
    throw std::invalid_argument("cross_entropy loss requires a softmax output head");
  const ForwardCache cache = forward_cached(net, input);
  const Eigen::VectorXd& p = cache.post.back();
  Eigen::VectorXd delta = p;
  delta(target_class) -= 1.0;
  return backprop_from_last_delta(net, input, cache, std::move(delta),
                                  cross_entropy(p, target_class));
}

GradientBundle backward(const Network& net, const Eigen::VectorXd& input,
                        const Eigen::VectorXd& target, LossKind loss_kind) {
  if (loss_kind != LossKind::kMse)
    throw std::invalid_argument("vector targets require the mse loss");
  if (net.output_head != OutputHead::kLinear)
    throw std::invalid_argument("mse loss requires a linear output head");
  if (target.size() != net.output_size()) throw std::invalid_argument("target shape mismatch");
  const ForwardCache cache = forward_cached(net, input);
  const Eigen::VectorXd& y = cache.post.back();
  const Eigen::VectorXd diff = y - target;
  return backprop_from_last_delta(net, input, cache, diff, 0.5 * diff.squaredNorm());
}

GradientBundle backward_output_grad(const Network& net, const Eigen::VectorXd& input,
                                    const Eigen::VectorXd& dloss_doutput) {
  if (dloss_doutput.size() != net.output_size())
    throw std::invalid_argument("output gradient shape mismatch");
  const ForwardCache cache = forward_cached(net, input);
  Eigen::VectorXd delta;
  if (net.output_head == OutputHead::kSoftmax) {
    const Eigen::VectorXd& p = cache.post.back();
    const double inner = dloss_doutput.dot(p);
    delta = (p.array() * (dloss_doutput.array() - inner)).matrix();
  } else {
    delta = dloss_doutput;
  }
  return backprop_from_last_delta(net, input, cache, std::move(delta), 0.0);
}

GradientBundle backward_batch_ce(const Network& net, const Eigen::MatrixXd& inputs,
                                 const std::vector<int>& targets) {
  if (static_cast<std::size_t>(inputs.cols()) != targets.size())
    throw std::invalid_argument("batch size mismatch");
  if (net.output_head != OutputHead::kSoftmax)
    throw std::invalid_argument("cross_entropy loss requires a softmax output head");
  const Eigen::Index B = inputs.cols();
  const int L = net.num_layers();

  std::vector<Eigen::MatrixXd> pre(L), post(L);
  Eigen::MatrixXd h = inputs;
  for (int k = 0; k < L; ++k) {
    pre[k] = (net.weights[k] * h).colwise() + net.biases[k];
    if (k + 1 < L) {
      if (net.hidden_activation == Activation::kTanh)
        post[k] = pre[k].array().tanh().matrix();
      else
        post[k] = pre[k].array().max(0.0).matrix();
    } else {
      post[k] = softmax_cols(pre[k]);
    }
    h = post[k];
  }

  GradientBundle g = GradientBundle::zeros_like(net);
  Eigen::MatrixXd delta = post[L - 1];
  for (Eigen::Index c = 0; c < B; ++c) {
    const int t = targets[static_cast<std::size_t>(c)];
    if (t < 0 || t >= net.output_size()) throw std::invalid_argument("target class out of range");
    delta(t, c) -= 1.0;
    g.loss += cross_entropy(post[L - 1].col(c), t);
  }
  for (int k = L - 1; k >= 0; --k) {
    const Eigen::MatrixXd& below = (k == 0) ? inputs : post[k - 1];
    g.weight_grads[k] = delta * below.transpose();
    g.bias_grads[k] = delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd up = net.weights[k].transpose() * delta;
      if (net.hidden_activation == Activation::kTanh) {
        delta = (up.array() * (1.0 - post[k - 1].array().square())).matrix();
      } else {
        delta = (up.array() * (pre[k - 1].array() > 0.0).cast<double>()).matrix();
      }
    }
  }
  g.scale(1.0 / static_cast<double>(B));
  g.input_grad.setZero();
  return g;
}

OptimizerState OptimizerState::zeros_like(const Network& net) {
  OptimizerState s;
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    s.m_w.emplace_back(Eigen::MatrixXd::Zero(net.weights[k].rows(), net.weights[k].cols()));
    s.v_w.emplace_back(Eigen::MatrixXd::Zero(net.weights[k].rows(), net.weights[k].cols()));
    s.m_b.emplace_back(Eigen::VectorXd::Zero(net.biases[k].size()));
    s.v_b.emplace_back(Eigen::VectorXd::Zero(net.biases[k].size()));
  }
  return s;
}

void step(Network& net, const GradientBundle& grads, OptimizerState& state,
          const OptimizerConfig& config) {
  if (grads.weight_grads.size() != net.weights.size())
    throw std::invalid_argument("gradient shapes do not match network");
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    if (grads.weight_grads[k].rows() != net.weights[k].rows() ||
        grads.weight_grads[k].cols() != net.weights[k].cols() ||
        grads.bias_grads[k].size() != net.biases[k].size())
      throw std::invalid_argument("gradient shapes do not match network at layer " +
                                  std::to_string(k));
    if (!grads.weight_grads[k].allFinite() || !grads.bias_grads[k].allFinite())
      throw std::runtime_error("numeric error: non-finite gradient in layer " + std::to_string(k));
  }

  if (config.kind == OptimizerConfig::Kind::kSgd) {
    for (std::size_t k = 0; k < net.weights.size(); ++k) {
      net.weights[k] -= config.learning_rate * grads.weight_grads[k];
      net.biases[k] -= config.learning_rate * grads.bias_grads[k];
    }
    ++state.step_count;
    return;
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    state.m_w[k] = config.beta1 * state.m_w[k] + (1.0 - config.beta1) * grads.weight_grads[k];
    state.v_w[k] = config.beta2 * state.v_w[k] +
                   (1.0 - config.beta2) * grads.weight_grads[k].array().square().matrix();
    state.m_b[k] = config.beta1 * state.m_b[k] + (1.0 - config.beta1) * grads.bias_grads[k];
    state.v_b[k] = config.beta2 * state.v_b[k] +
                   (1.0 - config.beta2) * grads.bias_grads[k].array().square().matrix();
    net.weights[k].array() -= config.learning_rate * (state.m_w[k].array() / bc1) /
                              ((state.v_w[k].array() / bc2).sqrt() + config.epsilon);
    net.biases[k].array() -= config.learning_rate * (state.m_b[k].array() / bc1) /
                             ((state.v_b[k].array() / bc2).sqrt() + config.epsilon);
  }
}

void save_network(const Network& net, std::ostream& out) {
  out << kNetworkMagic << " 1\n";
  out << "layer_sizes";
  for (int s : net.layer_sizes) out << ' ' << s;
  out << '\n';
  out << "hidden_activation " << activation_name(net.hidden_activation) << '\n';
  out << "output_head " << output_head_name(net.output_head) << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    out << "weights " << k;
    for (Eigen::Index i = 0; i < net.weights[k].rows(); ++i)
      for (Eigen::Index j = 0; j < net.weights[k].cols(); ++j) out << ' ' << net.weights[k](i, j);
    out << '\n';
    out << "biases " << k;
    for (Eigen::Index i = 0; i < net.biases[k].size(); ++i) out << ' ' << net.biases[k](i);
    out << '\n';
  }
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_network(net, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Network load_network(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kNetworkMagic || version != 1)
    throw std::runtime_error("not a network checkpoint (bad header)");

  std::string key;
  in >> key;
  if (key != "layer_sizes") throw std::runtime_error("checkpoint missing layer_sizes");
  std::vector<int> sizes;
  {
    std::string rest;
    std::getline(in, rest);
    std::istringstream ss(rest);
    int v;
    while (ss >> v) sizes.push_back(v);
  }
  std::string act_name, head_name;
  in >> key >> act_name;
  if (key != "hidden_activation") throw std::runtime_error("checkpoint missing hidden_activation");
  in >> key >> head_name;
  if (key != "output_head") throw std::runtime_error("checkpoint missing output_head");

  Network net = Network::zeros(sizes, parse_activation(act_name), parse_output_head(head_name));
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    std::size_t idx;
    in >> key >> idx;
    if (key != "weights" || idx != k) throw std::runtime_error("checkpoint weights out of order");
    for (Eigen::Index i = 0; i < net.weights[k].rows(); ++i)
      for (Eigen::Index j = 0; j < net.weights[k].cols(); ++j) in >> net.weights[k](i, j);
    in >> key >> idx;
    if (key != "biases" || idx != k) throw std::runtime_error("checkpoint biases out of order");
    for (Eigen::Index i = 0; i < net.biases[k].size(); ++i) in >> net.biases[k](i);
  }
  if (!in) throw std::runtime_error("truncated network checkpoint");
  return net;
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return load_network(in);
}

}  // namespace causim
