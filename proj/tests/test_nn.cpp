#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "causim/nn.hpp"

using namespace causim;

TEST_CASE("zero net with softmax head is uniform") {
  Network net = Network::zeros({2, 4, 3}, Activation::kTanh, OutputHead::kSoftmax);
  Eigen::VectorXd x(2);
  x << 0.3, -0.05;
  Eigen::VectorXd p = forward(net, x);
  REQUIRE(p.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(p(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("identity linear layer passes input through") {
  Network net = Network::zeros({2, 2}, Activation::kTanh, OutputHead::kLinear);
  net.weights[0] = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd x(2);
  x << 0.4, -0.07;
  Eigen::VectorXd y = forward(net, x);
  CHECK(y(0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(y(1) == doctest::Approx(-0.07).epsilon(1e-15));
}

TEST_CASE("seeded 2-layer forward matches the frozen reference value") {
  Rng rng(2024);
  Network net = Network::glorot({3, 8, 3}, Activation::kTanh, OutputHead::kSoftmax, rng);
  Eigen::VectorXd x(3);
  x << -0.5, 0.03, 1.0;
  Eigen::VectorXd p = forward(net, x);
  // Frozen from the pinned-seed reference run; the generator stream is
  // bitwise portable so these reproduce on any platform.
  CHECK(std::abs(p(0) - 0.24350033021022724) < 1e-12);
  CHECK(std::abs(p(1) - 0.60115286051616001) < 1e-12);
  CHECK(std::abs(p(2) - 0.15534680927361283) < 1e-12);
}

TEST_CASE("zero net cross entropy is ln 3") {
  Network net = Network::zeros({2, 3}, Activation::kTanh, OutputHead::kSoftmax);
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  GradientBundle g = backward(net, x, 0, LossKind::kCrossEntropy);
  CHECK(g.loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("perfect-fit mse has zero loss and gradients") {
  Rng rng(5);
  Network net = Network::glorot({2, 6, 2}, Activation::kTanh, OutputHead::kLinear, rng);
  Eigen::VectorXd x(2);
  x << 0.2, 0.9;
  Eigen::VectorXd target = forward(net, x);
  GradientBundle g = backward(net, x, target, LossKind::kMse);
  CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-15));
  for (const auto& W : g.weight_grads) CHECK(W.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  for (const auto& b : g.bias_grads) {
    if (b.size() > 0) CHECK(b.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("mismatched head and loss raise configuration errors") {
  Network soft = Network::zeros({2, 3}, Activation::kTanh, OutputHead::kSoftmax);
  Network lin = Network::zeros({2, 3}, Activation::kTanh, OutputHead::kLinear);
  Eigen::VectorXd x(2);
  x << 0.0, 0.0;
  Eigen::VectorXd t(3);
  t << 0.0, 0.0, 0.0;
  CHECK_THROWS(backward(lin, x, 0, LossKind::kCrossEntropy));
  CHECK_THROWS(backward(soft, x, t, LossKind::kMse));
}

TEST_CASE("forward rejects wrong input length") {
  Network net = Network::zeros({3, 2}, Activation::kTanh, OutputHead::kLinear);
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK_THROWS(forward(net, x));
}

namespace {

double loss_of(const Network& net, const Eigen::VectorXd& x, int cls, const Eigen::VectorXd* tgt) {
  if (tgt == nullptr) return cross_entropy(forward(net, x), cls);
  const Eigen::VectorXd y = forward(net, x);
  return 0.5 * (y - *tgt).squaredNorm();
}

void check_fd(Network net, const Eigen::VectorXd& x, int cls, const Eigen::VectorXd* tgt) {
  const GradientBundle g = tgt == nullptr ? backward(net, x, cls, LossKind::kCrossEntropy)
                                          : backward(net, x, *tgt, LossKind::kMse);
  const double h = 1e-5;
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    for (Eigen::Index i = 0; i < net.weights[k].rows(); ++i)
      for (Eigen::Index j = 0; j < net.weights[k].cols(); ++j) {
        const double saved = net.weights[k](i, j);
        net.weights[k](i, j) = saved + h;
        const double up = loss_of(net, x, cls, tgt);
        net.weights[k](i, j) = saved - h;
        const double dn = loss_of(net, x, cls, tgt);
        net.weights[k](i, j) = saved;
        const double fd = (up - dn) / (2.0 * h);
        const double an = g.weight_grads[k](i, j);
        const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
        CHECK(std::abs(fd - an) / denom < 1e-4);
      }
    for (Eigen::Index i = 0; i < net.biases[k].size(); ++i) {
      const double saved = net.biases[k](i);
      net.biases[k](i) = saved + h;
      const double up = loss_of(net, x, cls, tgt);
      net.biases[k](i) = saved - h;
      const double dn = loss_of(net, x, cls, tgt);
      net.biases[k](i) = saved;
      const double fd = (up - dn) / (2.0 * h);
      const double an = g.bias_grads[k](i);
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
      CHECK(std::abs(fd - an) / denom < 1e-4);
    }
  }
  // Input gradient through the same central differences.
  Eigen::VectorXd xv = x;
  for (Eigen::Index i = 0; i < xv.size(); ++i) {
    const double saved = xv(i);
    xv(i) = saved + h;
    const double up = loss_of(net, xv, cls, tgt);
    xv(i) = saved - h;
    const double dn = loss_of(net, xv, cls, tgt);
    xv(i) = saved;
    const double fd = (up - dn) / (2.0 * h);
    const double an = g.input_grad(i);
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
    CHECK(std::abs(fd - an) / denom < 1e-4);
  }
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  for (int trial = 0; trial < 4; ++trial) {
    Rng rng(100 + trial);
    Network soft = Network::glorot({4, 10, 6, 3},
                                   trial % 2 == 0 ? Activation::kTanh : Activation::kRelu,
                                   OutputHead::kSoftmax, rng);
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x(i) = rng.uniform(-1.0, 1.0);
    check_fd(soft, x, trial % 3, nullptr);

    Network lin = Network::glorot({3, 8, 2}, Activation::kTanh, OutputHead::kLinear, rng);
    Eigen::VectorXd x2(3), t(2);
    for (int i = 0; i < 3; ++i) x2(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 2; ++i) t(i) = rng.uniform(-1.0, 1.0);
    check_fd(lin, x2, 0, &t);
  }
}

TEST_CASE("output-grad backward agrees with loss backward for cross entropy") {
  Rng rng(31);
  Network net = Network::glorot({3, 6, 3}, Activation::kTanh, OutputHead::kSoftmax, rng);
  Eigen::VectorXd x(3);
  x << 0.1, -0.8, 0.4;
  const int cls = 2;
  GradientBundle direct = backward(net, x, cls, LossKind::kCrossEntropy);
  Eigen::VectorXd p = forward(net, x);
  Eigen::VectorXd dl = Eigen::VectorXd::Zero(3);
  dl(cls) = -1.0 / p(cls);
  GradientBundle chained = backward_output_grad(net, x, dl);
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    CHECK((direct.weight_grads[k] - chained.weight_grads[k]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((direct.bias_grads[k] - chained.bias_grads[k]).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((direct.input_grad - chained.input_grad).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("batch cross-entropy gradients equal the mean of per-sample gradients") {
  Rng rng(57);
  Network net = Network::glorot({3, 5, 3}, Activation::kRelu, OutputHead::kSoftmax, rng);
  const int B = 7;
  Eigen::MatrixXd xs(3, B);
  std::vector<int> ts(B);
  for (int c = 0; c < B; ++c) {
    for (int i = 0; i < 3; ++i) xs(i, c) = rng.uniform(-1.0, 1.0);
    ts[c] = static_cast<int>(rng.next_below(3));
  }
  GradientBundle batch = backward_batch_ce(net, xs, ts);
  GradientBundle acc = GradientBundle::zeros_like(net);
  for (int c = 0; c < B; ++c) acc.accumulate(backward(net, xs.col(c), ts[c], LossKind::kCrossEntropy));
  acc.scale(1.0 / B);
  CHECK(batch.loss == doctest::Approx(acc.loss).epsilon(1e-12));
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    CHECK((batch.weight_grads[k] - acc.weight_grads[k]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((batch.bias_grads[k] - acc.bias_grads[k]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward_batch matches per-column forward") {
  Rng rng(71);
  Network net = Network::glorot({4, 9, 3}, Activation::kTanh, OutputHead::kSoftmax, rng);
  Eigen::MatrixXd xs(4, 5);
  for (int c = 0; c < 5; ++c)
    for (int i = 0; i < 4; ++i) xs(i, c) = rng.uniform(-2.0, 2.0);
  Eigen::MatrixXd ys = forward_batch(net, xs);
  for (int c = 0; c < 5; ++c)
    CHECK((ys.col(c) - forward(net, xs.col(c))).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero gradients leave parameters fixed") {
  Rng rng(83);
  Network net = Network::glorot({2, 4, 2}, Activation::kTanh, OutputHead::kLinear, rng);
  Network before = net;
  GradientBundle g = GradientBundle::zeros_like(net);
  OptimizerState st = OptimizerState::zeros_like(net);
  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::kSgd;
  step(net, g, st, cfg);
  for (std::size_t k = 0; k < net.weights.size(); ++k)
    CHECK((net.weights[k] - before.weights[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one sgd step on a scalar follows the definition") {
  Network net = Network::zeros({1, 1}, Activation::kTanh, OutputHead::kLinear);
  net.weights[0](0, 0) = 1.0;
  GradientBundle g = GradientBundle::zeros_like(net);
  g.weight_grads[0](0, 0) = 0.5;
  OptimizerState st = OptimizerState::zeros_like(net);
  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::kSgd;
  cfg.learning_rate = 0.1;
  step(net, g, st, cfg);
  CHECK(net.weights[0](0, 0) == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("adam drives a 2-d quadratic bowl below 1e-6 in 200 steps") {
  // Minimize 0.5 * ((w0 - 0.3)^2 + (w1 + 0.7)^2) over two bias parameters.
  Network net = Network::zeros({1, 2}, Activation::kTanh, OutputHead::kLinear);
  OptimizerState st = OptimizerState::zeros_like(net);
  OptimizerConfig cfg;
  cfg.learning_rate = 0.05;
  Eigen::VectorXd target(2);
  target << 0.3, -0.7;
  Eigen::VectorXd x(1);
  x << 0.0;
  double loss = 1.0;
  for (int i = 0; i < 200; ++i) {
    GradientBundle g = backward(net, x, target, LossKind::kMse);
    loss = g.loss;
    step(net, g, st, cfg);
  }
  CHECK(loss < 1e-6);
}

TEST_CASE("non-finite gradients raise a numeric error naming the layer") {
  Network net = Network::zeros({2, 3, 2}, Activation::kTanh, OutputHead::kLinear);
  GradientBundle g = GradientBundle::zeros_like(net);
  g.weight_grads[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
  OptimizerState st = OptimizerState::zeros_like(net);
  OptimizerConfig cfg;
  CHECK_THROWS_WITH_AS(step(net, g, st, cfg), doctest::Contains("layer 1"), std::runtime_error);
}

TEST_CASE("checkpoint round-trips bitwise") {
  Rng rng(97);
  Network net = Network::glorot({3, 64, 64, 3}, Activation::kTanh, OutputHead::kSoftmax, rng);
  // Push params off the clean init grid so serialization sees long decimals.
  net.weights[1].array() += 1.0e-13;
  std::stringstream ss;
  save_network(net, ss);
  Network back = load_network(ss);
  REQUIRE(back.layer_sizes == net.layer_sizes);
  CHECK(back.hidden_activation == net.hidden_activation);
  CHECK(back.output_head == net.output_head);
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    for (Eigen::Index i = 0; i < net.weights[k].rows(); ++i)
      for (Eigen::Index j = 0; j < net.weights[k].cols(); ++j)
        CHECK(back.weights[k](i, j) == net.weights[k](i, j));
    for (Eigen::Index i = 0; i < net.biases[k].size(); ++i)
      CHECK(back.biases[k](i) == net.biases[k](i));
  }
}

TEST_CASE("training is bitwise deterministic under a fixed seed") {
  auto train_once = [] {
    Rng rng(12345);
    Network net = Network::glorot({3, 16, 3}, Activation::kTanh, OutputHead::kSoftmax, rng);
    OptimizerState st = OptimizerState::zeros_like(net);
    OptimizerConfig cfg;
    Eigen::MatrixXd xs(3, 32);
    std::vector<int> ts(32);
    for (int c = 0; c < 32; ++c) {
      for (int i = 0; i < 3; ++i) xs(i, c) = rng.uniform(-1.0, 1.0);
      ts[c] = static_cast<int>(rng.next_below(3));
    }
    for (int e = 0; e < 20; ++e) step(net, backward_batch_ce(net, xs, ts), st, cfg);
    return net;
  };
  Network a = train_once();
  Network b = train_once();
  for (std::size_t k = 0; k < a.weights.size(); ++k) {
    CHECK((a.weights[k] - b.weights[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.biases[k] - b.biases[k]).cwiseAbs().maxCoeff() == 0.0);
  }
}
