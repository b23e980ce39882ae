#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <thread>

#include "causim/expert.hpp"
#include "causim/stats.hpp"

using namespace causim;

TEST_CASE("expert rule follows velocity sign") {
  CoreState s;
  s.velocity = 0.01;
  CHECK(expert_act(s) == 2);
  s.velocity = -0.03;
  CHECK(expert_act(s) == 0);
  s.velocity = 0.0;
  CHECK(expert_act(s) == 2);
}

TEST_CASE("expert mean return over 100 episodes is at least -130") {
  Scenario sc = Scenario::make(ScenarioKind::kConfounded, 2);
  const Actor expert = [](const CoreState& s, const Eigen::Vector3d&) { return expert_act(s); };
  std::vector<double> returns;
  for (int ep = 0; ep < 100; ++ep)
    returns.push_back(run_episode(sc, expert, derive_seed(7, ep)).total_reward);
  const double m = mean(returns);
  std::printf("expert mean return = %.2f\n", m);
  CHECK(m >= -130.0);
}

TEST_CASE("query counter counts every call and matches expert_act") {
  ExpertQuery q;
  Rng rng(3);
  for (int i = 0; i < 57; ++i) {
    CoreState s;
    s.position = rng.uniform(-1.2, 0.6);
    s.velocity = rng.uniform(-0.07, 0.07);
    CHECK(q.query(s) == expert_act(s));
  }
  CHECK(q.count() == 57);
  q.reset();
  CHECK(q.count() == 0);
}

TEST_CASE("query counter is exact under concurrent callers") {
  ExpertQuery q;
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w)
    threads.emplace_back([&q] {
      CoreState s;
      for (int i = 0; i < 1000; ++i) q.query(s);
    });
  for (auto& t : threads) t.join();
  CHECK(q.count() == 4000);
}

TEST_CASE("collect_demos records whole episodes deterministically") {
  Scenario sc = Scenario::make(ScenarioKind::kConfounded, 11);
  DemoSet one = collect_demos(sc, 1, 5);
  CHECK(one.transitions.size() <= static_cast<std::size_t>(kHorizon));
  CHECK(one.transitions.front().t == 0);
  for (std::size_t i = 1; i < one.transitions.size(); ++i)
    CHECK(one.transitions[i].t == one.transitions[i - 1].t + 1);

  DemoSet a = collect_demos(sc, 5, 5);
  DemoSet b = collect_demos(sc, 5, 5);
  REQUIRE(a.transitions.size() == b.transitions.size());
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    CHECK(a.transitions[i].action == b.transitions[i].action);
    CHECK((a.transitions[i].x - b.transitions[i].x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("collect_demo_transitions reaches the target with whole episodes") {
  Scenario sc = Scenario::make(ScenarioKind::kConfounded, 11);
  DemoSet d = collect_demo_transitions(sc, 5000, 1);
  CHECK(d.transitions.size() >= 5000);
  int last_ep = d.transitions.back().episode_id;
  std::size_t last_len = 0;
  for (const auto& tr : d.transitions)
    if (tr.episode_id == last_ep) ++last_len;
  std::size_t count_before = d.transitions.size() - last_len;
  CHECK(count_before < 5000);
}

TEST_CASE("confounded demos carry the past action in a channel") {
  Scenario sc = Scenario::make(ScenarioKind::kConfounded, 13);
  int action_dim = -1;
  for (int i = 0; i < 3; ++i)
    if (sc.dim_permutation[i] == 2) action_dim = i;
  DemoSet d = collect_demo_transitions(sc, 10000, 3);
  std::vector<double> channel, action;
  for (const auto& tr : d.transitions) {
    channel.push_back(tr.x(action_dim));
    action.push_back(static_cast<double>(tr.action));
  }
  const double corr = pearson_corr(channel, action);
  std::printf("corr(action channel, current action) = %.3f\n", corr);
  CHECK(corr > 0.5);
}

TEST_CASE("demo files round-trip losslessly") {
  for (ScenarioKind kind :
       {ScenarioKind::kOriginal, ScenarioKind::kConfounded, ScenarioKind::kConfoundedEntangled}) {
    Scenario sc = Scenario::make(kind, 17);
    DemoSet d = collect_demos(sc, 3, 9);
    std::stringstream ss;
    save_demos(d, ss);
    DemoSet back = load_demos(ss);
    CHECK(back.scenario.kind == d.scenario.kind);
    CHECK(back.scenario.dim_permutation == d.scenario.dim_permutation);
    CHECK(back.expert_name == d.expert_name);
    CHECK(back.seed == d.seed);
    REQUIRE(back.transitions.size() == d.transitions.size());
    for (std::size_t i = 0; i < d.transitions.size(); ++i) {
      CHECK(back.transitions[i].episode_id == d.transitions[i].episode_id);
      CHECK(back.transitions[i].t == d.transitions[i].t);
      CHECK(back.transitions[i].action == d.transitions[i].action);
      for (int c = 0; c < 3; ++c) CHECK(back.transitions[i].x(c) == d.transitions[i].x(c));
    }
  }
}

TEST_CASE("loading rejects malformed files") {
  std::stringstream bad("not a demo file");
  CHECK_THROWS(load_demos(bad));
  Scenario sc = Scenario::make(ScenarioKind::kConfounded, 1);
  DemoSet d = collect_demos(sc, 1, 1);
  std::stringstream ss;
  save_demos(d, ss);
  std::string text = ss.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS(load_demos(truncated));
}
