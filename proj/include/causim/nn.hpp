#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "causim/rng.hpp"

namespace causim {

enum class Activation { kTanh, kRelu };
enum class OutputHead { kLinear, kSoftmax };
enum class LossKind { kCrossEntropy, kMse };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& s);
std::string output_head_name(OutputHead h);
OutputHead parse_output_head(const std::string& s);

// Dense feedforward network. weights[k] has shape
// (layer_sizes[k+1], layer_sizes[k]); the hidden activation is applied after
// every layer except the last, which feeds the output head.
struct Network {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Activation hidden_activation = Activation::kTanh;
  OutputHead output_head = OutputHead::kLinear;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }

  static Network zeros(std::vector<int> sizes, Activation act, OutputHead head);
  // Uniform(+-sqrt(6/(fan_in+fan_out))) init.
  static Network glorot(std::vector<int> sizes, Activation act, OutputHead head, Rng& rng);
};

// Per-parameter gradients mirroring a Network's shapes, plus the loss value
// and the gradient with respect to the network input.
struct GradientBundle {
  std::vector<Eigen::MatrixXd> weight_grads;
  std::vector<Eigen::VectorXd> bias_grads;
  double loss = 0.0;
  Eigen::VectorXd input_grad;

  static GradientBundle zeros_like(const Network& net);
  void accumulate(const GradientBundle& other);
  void scale(double factor);
};

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& input);
// Columns are independent samples.
Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& inputs);

// Cross-entropy against a target class (requires a softmax head).
GradientBundle backward(const Network& net, const Eigen::VectorXd& input, int target_class,
                        LossKind loss_kind);
// 0.5 * squared error against a target vector (requires a linear head).
GradientBundle backward(const Network& net, const Eigen::VectorXd& input,
                        const Eigen::VectorXd& target, LossKind loss_kind);
// Backpropagates a caller-supplied cotangent of the network output.
GradientBundle backward_output_grad(const Network& net, const Eigen::VectorXd& input,
                                    const Eigen::VectorXd& dloss_doutput);
// Mean cross-entropy gradients over a batch of columns.
GradientBundle backward_batch_ce(const Network& net, const Eigen::MatrixXd& inputs,
                                 const std::vector<int>& targets);

double cross_entropy(const Eigen::VectorXd& probs, int target_class);

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step_count = 0;

  static OptimizerState zeros_like(const Network& net);
};

// Applies one optimizer update in place. Throws on non-finite gradients,
// naming the offending layer.
void step(Network& net, const GradientBundle& grads, OptimizerState& state,
          const OptimizerConfig& config);

// Text checkpoint with >= 17 significant digits; round-trips bitwise.
void save_network(const Network& net, std::ostream& out);
void save_network(const Network& net, const std::string& path);
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);

}  // namespace causim
