#include "causim/expert.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace causim {

DemoSet collect_demos(const Scenario& scenario, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  DemoSet demos;
  demos.scenario = scenario;
  demos.seed = seed;
  const Actor expert = [](const CoreState& s, const Eigen::Vector3d&) { return expert_act(s); };
  for (int ep = 0; ep < episodes; ++ep) {
    const EpisodeTrace trace = run_episode(scenario, expert, derive_seed(seed, ep));
    for (std::size_t t = 0; t < trace.actions.size(); ++t) {
      Transition tr;
      tr.episode_id = ep;
      tr.t = static_cast<int>(t);
      tr.x = trace.observations[t];
      tr.action = trace.actions[t];
      demos.transitions.push_back(tr);
    }
  }
  return demos;
}

DemoSet collect_demo_transitions(const Scenario& scenario, int min_transitions,
                                 std::uint64_t seed) {
  if (min_transitions < 1) throw std::invalid_argument("min_transitions must be >= 1");
  DemoSet demos;
  demos.scenario = scenario;
  demos.seed = seed;
  const Actor expert = [](const CoreState& s, const Eigen::Vector3d&) { return expert_act(s); };
  int ep = 0;
  while (static_cast<int>(demos.transitions.size()) < min_transitions) {
    const EpisodeTrace trace = run_episode(scenario, expert, derive_seed(seed, ep));
    for (std::size_t t = 0; t < trace.actions.size(); ++t) {
      Transition tr;
      tr.episode_id = ep;
      tr.t = static_cast<int>(t);
      tr.x = trace.observations[t];
      tr.action = trace.actions[t];
      demos.transitions.push_back(tr);
    }
    ++ep;
  }
  return demos;
}

void save_demos(const DemoSet& demos, std::ostream& out) {
  out << "demoset 1\n";
  write_scenario(demos.scenario, out);
  out << "expert_name " << demos.expert_name << '\n';
  out << "seed " << demos.seed << '\n';
  out << "transitions " << demos.transitions.size() << '\n';
  out << std::setprecision(17);
  for (const Transition& tr : demos.transitions)
    out << tr.episode_id << ' ' << tr.t << ' ' << tr.x(0) << ' ' << tr.x(1) << ' ' << tr.x(2)
        << ' ' << tr.action << '\n';
}

void save_demos(const DemoSet& demos, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_demos(demos, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

DemoSet load_demos(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "demoset" || version != 1) throw std::runtime_error("not a demo file (bad header)");
  DemoSet demos;
  demos.scenario = read_scenario(in);
  std::string key;
  in >> key >> demos.expert_name;
  if (key != "expert_name") throw std::runtime_error("demo file missing expert_name");
  in >> key >> demos.seed;
  if (key != "seed") throw std::runtime_error("demo file missing seed");
  std::size_t count = 0;
  in >> key >> count;
  if (key != "transitions") throw std::runtime_error("demo file missing transition count");
  demos.transitions.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Transition& tr = demos.transitions[i];
    in >> tr.episode_id >> tr.t >> tr.x(0) >> tr.x(1) >> tr.x(2) >> tr.action;
    if (!in) throw std::runtime_error("truncated demo file at transition " + std::to_string(i));
    if (tr.action < 0 || tr.action > 2)
      throw std::runtime_error("demo file holds an invalid action at transition " +
                               std::to_string(i));
  }
  return demos;
}

DemoSet load_demos_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return load_demos(in);
}

}  // namespace causim
