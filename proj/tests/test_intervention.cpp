#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "causim/intervention.hpp"
#include "causim/stats.hpp"

using namespace causim;

namespace {

CausalGraph mask_for_raw(const Scenario& sc, std::initializer_list<int> raw_dims) {
  CausalGraph g = CausalGraph::all_zeros(3);
  for (int i = 0; i < 3; ++i)
    for (int r : raw_dims)
      if (sc.dim_permutation[i] == r) g.bits[i] = 1;
  return g;
}

std::vector<double> bernoulli_product(const EnergyModel& em) {
  const int n = em.size();
  std::vector<double> p(1ull << n, 1.0);
  for (std::size_t gi = 0; gi < p.size(); ++gi)
    for (int i = 0; i < n; ++i) {
      const double q = bit_probability(em, i);
      p[gi] *= (gi & (1ull << i)) ? q : 1.0 - q;
    }
  return p;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

}  // namespace

TEST_CASE("zero-energy sampling is fair per bit") {
  EnergyModel em = EnergyModel::uniform(3);
  Rng rng(5);
  int counts[3] = {0, 0, 0};
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) {
    CausalGraph g = sample_graph(em, rng);
    for (int i = 0; i < 3; ++i) counts[i] += g.bit(i);
  }
  for (int i = 0; i < 3; ++i) {
    const double f = static_cast<double>(counts[i]) / draws;
    CHECK(f >= 0.49);
    CHECK(f <= 0.51);
  }
}

TEST_CASE("saturated weight pins its bit") {
  EnergyModel em = EnergyModel::uniform(3);
  em.w(1) = 50.0;
  Rng rng(6);
  for (int d = 0; d < 10000; ++d) CHECK(sample_graph(em, rng).bit(1));
}

TEST_CASE("sampler matches the enumerated distribution within TV 0.01") {
  EnergyModel em = EnergyModel::uniform(3);
  em.w << 1.0, -1.0, 0.0;
  const std::vector<double> exact = enumerate_energy_distribution(em);
  std::vector<double> freq(8, 0.0);
  Rng rng(7);
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) freq[sample_graph(em, rng).to_index()] += 1.0 / draws;
  const double tv = tv_distance(exact, freq);
  std::printf("sampler TV at n=3: %.5f\n", tv);
  CHECK(tv < 0.01);
}

TEST_CASE("factorization identity holds exactly for n up to 10") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(10));
    EnergyModel em = EnergyModel::uniform(n);
    for (int i = 0; i < n; ++i) em.w(i) = rng.uniform(-3.0, 3.0);
    em.tau = rng.uniform(0.1, 2.0);
    const double tv = tv_distance(enumerate_energy_distribution(em), bernoulli_product(em));
    CHECK(tv < 1e-12);
  }
}

TEST_CASE("mode equals the enumerated argmax") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(10));
    EnergyModel em = EnergyModel::uniform(n);
    for (int i = 0; i < n; ++i) em.w(i) = rng.uniform(-2.0, 2.0);
    em.tau = rng.uniform(0.2, 2.0);
    const std::vector<double> p = enumerate_energy_distribution(em);
    std::size_t best = 0;
    for (std::size_t gi = 1; gi < p.size(); ++gi)
      if (p[gi] > p[best]) best = gi;
    CHECK(mode_graph(em).to_index() == best);
  }
}

TEST_CASE("fit_energy recovers an exactly linear score") {
  Eigen::Vector3d w_true(4.0, -2.5, 0.75);
  const double b_true = -120.0;
  std::vector<InterventionRecord> records;
  for (std::uint64_t gi = 0; gi < 8; ++gi) {
    InterventionRecord r;
    r.graph = CausalGraph::from_index(gi, 3);
    r.score = b_true;
    for (int i = 0; i < 3; ++i)
      if (r.graph.bit(i)) r.score += w_true(i);
    r.episode_index = static_cast<int>(gi);
    records.push_back(r);
  }
  EnergyModel em = fit_energy(records, 1e-9);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(em.w(i) - w_true(i)) < 1e-6);
  CHECK(std::abs(em.b - b_true) < 1e-6);
}

TEST_CASE("constant scores give zero weights") {
  std::vector<InterventionRecord> records;
  Rng rng(10);
  for (int r = 0; r < 40; ++r) {
    InterventionRecord rec;
    rec.graph = CausalGraph::from_index(rng.next_below(8), 3);
    rec.score = -150.0;
    rec.episode_index = r;
    records.push_back(rec);
  }
  EnergyModel em = fit_energy(records, 1e-3);
  CHECK(em.w.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(em.b == doctest::Approx(-150.0).epsilon(1e-6));
}

TEST_CASE("a single record still fits") {
  std::vector<InterventionRecord> records(1);
  records[0].graph = CausalGraph::from_string("101");
  records[0].score = -77.0;
  EnergyModel em = fit_energy(records, 1e-3);
  CHECK(em.w.allFinite());
  CHECK(std::isfinite(em.b));
  CHECK_THROWS_AS(fit_energy({}, 1e-3), std::invalid_argument);
}

TEST_CASE("exact posterior normalizes and matches the energy mode for linear scores") {
  std::vector<double> uniform_l(8, 1.0), uniform_p(8, 0.125);
  std::vector<double> post = exact_posterior(uniform_l, uniform_p);
  double total = 0.0;
  for (double v : post) {
    CHECK(v == doctest::Approx(0.125).epsilon(1e-12));
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector3d w(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    std::vector<InterventionRecord> records;
    std::vector<double> likelihood(8);
    for (std::uint64_t gi = 0; gi < 8; ++gi) {
      InterventionRecord r;
      r.graph = CausalGraph::from_index(gi, 3);
      r.score = 0.0;
      for (int i = 0; i < 3; ++i)
        if (r.graph.bit(i)) r.score += w(i);
      records.push_back(r);
      likelihood[gi] = std::exp(r.score);
    }
    std::vector<double> prior(8, 0.125);
    std::vector<double> p = exact_posterior(likelihood, prior);
    std::size_t best = 0;
    for (std::size_t gi = 1; gi < 8; ++gi)
      if (p[gi] > p[best]) best = gi;
    CHECK(best == mode_graph(fit_energy(records, 1e-9)).to_index());
  }

  CHECK_THROWS(exact_posterior({1.0, std::numeric_limits<double>::infinity()}, {0.5, 0.5}));
  CHECK_THROWS(exact_posterior({0.0, 0.0}, {0.5, 0.5}));
}

TEST_CASE("disagreement vanishes when the policy ignores its mask") {
  GraphPolicy p;
  p.n = 3;
  p.net = Network::zeros({6, 16, 3}, Activation::kTanh, OutputHead::kSoftmax);
  EnergyModel em = EnergyModel::uniform(3);
  Rng rng(12);
  Eigen::VectorXd x(3);
  x << -0.5, 0.02, 1.0;
  CHECK(disagreement_score(p, x, em, 0, rng) < 1e-9);
  CHECK(disagreement_score(p, x, em, 64, rng) < 1e-9);
}

TEST_CASE("two deterministic disjoint conditionals disagree by ln 2") {
  // n = 1: graph 0 fires action 0, graph 1 fires action 1, uniform energy.
  GraphPolicy p;
  p.n = 1;
  p.net = Network::zeros({2, 3}, Activation::kTanh, OutputHead::kSoftmax);
  // logits = W * [x*g, g]; column 1 (the mask bit) swings the decision.
  p.net.weights[0](0, 1) = -60.0;
  p.net.weights[0](1, 1) = 60.0;
  p.net.biases[0](0) = 30.0;
  p.net.biases[0](1) = -30.0;
  p.net.biases[0](2) = -90.0;
  EnergyModel em = EnergyModel::uniform(1);
  Rng rng(13);
  Eigen::VectorXd x(1);
  x << 0.0;
  const double d = disagreement_score(p, x, em, 0, rng);
  CHECK(d == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("trace files round-trip bitwise and replay to the same mode") {
  std::vector<InterventionTraceRow> trace;
  Rng rng(14);
  std::vector<InterventionRecord> records;
  for (int ep = 0; ep < 30; ++ep) {
    InterventionRecord rec;
    rec.graph = CausalGraph::from_index(rng.next_below(8), 3);
    rec.score = -200.0 + 70.0 * rec.graph.bit(0) + 40.0 * rec.graph.bit(2) + rng.normal();
    rec.episode_index = ep;
    records.push_back(rec);

    InterventionTraceRow row;
    row.episode_index = ep;
    row.graph = rec.graph;
    row.raw_score = rec.score;
    row.standardized_score = 0.0;
    EnergyModel em = fit_energy(records, 1e-3);
    row.w = em.w;
    row.b = em.b;
    row.mode_bits = mode_graph(em);
    row.mode_return_estimate = em.b;
    trace.push_back(row);
  }
  std::stringstream ss;
  write_trace(trace, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "episode_index,graph_bits,raw_score,standardized_score,w_1,w_2,w_3,b,mode_bits,"
        "mode_return_estimate");
  ss.seekg(0);
  std::vector<InterventionTraceRow> back = read_trace(ss);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(back[i].episode_index == trace[i].episode_index);
    CHECK(back[i].graph == trace[i].graph);
    CHECK(back[i].raw_score == trace[i].raw_score);
    CHECK((back[i].w - trace[i].w).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back[i].b == trace[i].b);
    CHECK(back[i].mode_bits == trace[i].mode_bits);
  }
  CHECK(replay_trace(back, 1e-3) == trace.back().mode_bits);
}

// Shared trained policy for the closed-loop cases below.
static const Scenario kScenario = Scenario::make(ScenarioKind::kConfounded, 33);
static const GraphPolicy& trained_policy() {
  static GraphPolicy gp = [] {
    DemoSet demos = collect_demo_transitions(kScenario, 5000, 100);
    TrainConfig cfg;
    cfg.seed = 7;
    return train_graph_policy(demos, cfg);
  }();
  return gp;
}

TEST_CASE("per-graph closed-loop returns separate causal from confounded masks") {
  const GraphPolicy& gp = trained_policy();
  double ret[8];
  for (std::uint64_t gi = 0; gi < 8; ++gi) {
    CausalGraph g = CausalGraph::from_index(gi, 3);
    ret[gi] = eval_graph_policy(gp, g, kScenario, 100, 4242).mean_return;
    std::printf("graph %s: return %.1f\n", g.to_string().c_str(), ret[gi]);
  }
  const CausalGraph g_true = mask_for_raw(kScenario, {0, 1});
  const CausalGraph g_vel = mask_for_raw(kScenario, {1});
  const CausalGraph g_act = mask_for_raw(kScenario, {2});
  std::printf("true %s: %.1f | vel-only %s: %.1f | action-only %s: %.1f\n",
              g_true.to_string().c_str(), ret[g_true.to_index()], g_vel.to_string().c_str(),
              ret[g_vel.to_index()], g_act.to_string().c_str(), ret[g_act.to_index()]);
  CHECK(ret[g_true.to_index()] >= -160.0);
  CHECK(ret[g_act.to_index()] <= -190.0);
  CHECK(ret[CausalGraph::all_zeros(3).to_index()] <= -190.0);
}

// The scripted expert acts on velocity alone, so velocity is the one
// indispensable channel; the decisive causal fact the search must get right
// is rejecting the action channel while keeping velocity. Whether the
// position bit joins is return-neutral here (see the per-graph returns
// above), so these cases pin the stable facts only.
TEST_CASE("policy execution intervention drops the confounder on a fixed seed") {
  const GraphPolicy& gp = trained_policy();
  const CausalGraph g_act = mask_for_raw(kScenario, {2});
  const CausalGraph g_vel = mask_for_raw(kScenario, {1});
  InterventionResult res = policy_execution_intervention(gp, kScenario, 50,
                                                         EnergyModel::uniform(3), 99);
  std::printf("intervention mode %s, final w = (%.2f, %.2f, %.2f)\n",
              res.mode.to_string().c_str(), res.model.w(0), res.model.w(1), res.model.w(2));
  CHECK(res.trace.size() == 50);
  for (int i = 0; i < 3; ++i) {
    if (g_act.bit(i)) CHECK_FALSE(res.mode.bit(i));
    if (g_vel.bit(i)) CHECK(res.mode.bit(i));
  }

  const double final_return =
      eval_graph_policy(gp, res.mode, kScenario, 100, 555).mean_return;
  std::printf("mode-graph return %.1f\n", final_return);
  CHECK(final_return >= -157.0);
  CHECK(final_return <= -117.0);
}

TEST_CASE("expert query intervention drops the confounder within 20 queries") {
  const GraphPolicy& gp = trained_policy();
  const CausalGraph g_act = mask_for_raw(kScenario, {2});
  const CausalGraph g_vel = mask_for_raw(kScenario, {1});
  ExpertQuery expert;
  InterventionResult res =
      expert_query_intervention(gp, kScenario, expert, 20, EnergyModel::uniform(3), 31);
  std::printf("expert-query mode %s, queries %ld\n", res.mode.to_string().c_str(),
              expert.count());
  CHECK(expert.count() == 20);
  for (int i = 0; i < 3; ++i) {
    if (g_act.bit(i)) CHECK_FALSE(res.mode.bit(i));
    if (g_vel.bit(i)) CHECK(res.mode.bit(i));
  }
  const double ret = eval_graph_policy(gp, res.mode, kScenario, 100, 556).mean_return;
  std::printf("expert-query mode return %.1f\n", ret);
  CHECK(ret >= -180.0);
}

TEST_CASE("query budget larger than the collected states is rejected") {
  const GraphPolicy& gp = trained_policy();
  ExpertQuery expert;
  InterventionConfig cfg;
  cfg.collect_episodes = 1;
  CHECK_THROWS_AS(expert_query_intervention(gp, kScenario, expert, 100000,
                                            EnergyModel::uniform(3), 31, cfg),
                  std::invalid_argument);
}
