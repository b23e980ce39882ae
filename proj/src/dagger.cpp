#include "causim/dagger.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "causim/stats.hpp"

namespace causim {

namespace {

DaggerPoint evaluate_point(const DaggerState& st, const Scenario& scenario, int episodes,
                           std::uint64_t seed) {
  const EvalResult eval = eval_bc(st.current_policy, scenario, episodes, seed);
  DaggerPoint pt;
  pt.iteration = st.iteration;
  pt.cumulative_queries = st.query_count;
  pt.mean_return = eval.mean_return;
  pt.std_return = eval.returns.size() > 1 ? stddev(eval.returns) : 0.0;
  return pt;
}

}  // namespace

DaggerResult dagger_run(const Scenario& scenario, ExpertQuery& expert, int iterations,
                        int rollouts_per_iter, const DaggerConfig& config, std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (rollouts_per_iter < 1) throw std::invalid_argument("rollouts_per_iter must be >= 1");

  const long base_queries = expert.count();

  DaggerResult result;
  DaggerState& st = result.state;
  st.aggregated =
      collect_demo_transitions(scenario, config.initial_min_transitions, derive_seed(seed, 0));

  TrainConfig tc = config.train;
  tc.seed = derive_seed(seed, 100);
  st.current_policy = train_bc(st.aggregated, tc);
  st.iteration = 0;
  st.query_count = 0;
  result.curve.push_back(evaluate_point(st, scenario, config.eval_episodes, derive_seed(seed, 200)));

  int next_episode_id = st.aggregated.transitions.back().episode_id + 1;
  for (int iter = 1; iter < iterations; ++iter) {
    const Network snapshot = st.current_policy;
    Actor actor = [&snapshot](const CoreState&, const Eigen::Vector3d& obs) {
      return net_act(snapshot, obs);
    };
    for (int r = 0; r < rollouts_per_iter; ++r) {
      const EpisodeTrace trace = run_episode(
          scenario, actor,
          derive_seed(seed, 300 + static_cast<std::uint64_t>(iter) * 1000 +
                                static_cast<std::uint64_t>(r)));
      for (std::size_t t = 0; t < trace.states.size(); ++t) {
        Transition tr;
        tr.episode_id = next_episode_id;
        tr.t = static_cast<int>(t);
        tr.x = trace.observations[t];
        tr.action = expert.query(trace.states[t]);
        st.aggregated.transitions.push_back(tr);
      }
      ++next_episode_id;
    }

    tc.seed = derive_seed(seed, 100 + static_cast<std::uint64_t>(iter));
    st.current_policy = config.warm_start ? train_bc_warm(st.current_policy, st.aggregated, tc)
                                          : train_bc(st.aggregated, tc);
    st.iteration = iter;
    st.query_count = expert.count() - base_queries;
    result.curve.push_back(evaluate_point(st, scenario, config.eval_episodes,
                                          derive_seed(seed, 200 + static_cast<std::uint64_t>(iter))));
  }
  return result;
}

void write_dagger_curve(const std::vector<DaggerPoint>& curve, std::ostream& out) {
  out << "iteration,cumulative_queries,mean_return,std_return\n" << std::setprecision(17);
  for (const auto& pt : curve)
    out << pt.iteration << ',' << pt.cumulative_queries << ',' << pt.mean_return << ','
        << pt.std_return << '\n';
}

void write_dagger_curve(const std::vector<DaggerPoint>& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_dagger_curve(curve, out);
}

}  // namespace causim
