#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causim/causim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(causim_status status) {
  switch (status) {
    case CAUSIM_OK: return kExitOk;
    case CAUSIM_INVALID_ARGUMENT:
    case CAUSIM_CONFIG_ERROR: return kExitConfig;
    default: return kExitRuntime;
  }
}

int fail(causim_status status) {
  std::fprintf(stderr, "error: %s\n", causim_last_error());
  return exit_code_for(status);
}

using ScenarioPtr = std::unique_ptr<causim_scenario, decltype(&causim_scenario_destroy)>;
using DemosPtr = std::unique_ptr<causim_demos, decltype(&causim_demos_destroy)>;
using PolicyPtr = std::unique_ptr<causim_policy, decltype(&causim_policy_destroy)>;
using GraphPolicyPtr =
    std::unique_ptr<causim_graph_policy, decltype(&causim_graph_policy_destroy)>;

ScenarioPtr make_scenario(causim_scenario* p = nullptr) {
  return ScenarioPtr(p, &causim_scenario_destroy);
}
DemosPtr make_demos(causim_demos* p = nullptr) { return DemosPtr(p, &causim_demos_destroy); }
PolicyPtr make_policy(causim_policy* p = nullptr) { return PolicyPtr(p, &causim_policy_destroy); }
GraphPolicyPtr make_graph_policy(causim_graph_policy* p = nullptr) {
  return GraphPolicyPtr(p, &causim_graph_policy_destroy);
}

struct TrainFlags {
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  double val_fraction = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "training epochs (library default when omitted)");
    cmd->add_option("--batch-size", batch_size, "minibatch size");
    cmd->add_option("--learning-rate", learning_rate, "optimizer step size");
    cmd->add_option("--val-fraction", val_fraction, "held-out fraction for accuracy logging");
    cmd->add_option("--seed", seed, "training seed");
  }

  causim_train_options options() const {
    causim_train_options opt{};
    opt.epochs = epochs;
    opt.batch_size = batch_size;
    opt.learning_rate = learning_rate;
    opt.val_fraction = val_fraction;
    opt.seed = seed;
    return opt;
  }
};

struct InterventionFlags {
  double ridge = 0.0;
  double tau_start = 0.0;
  double tau_end = 0.0;
  int collect_episodes = 0;
  int graph_samples = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--ridge", ridge, "posterior fit ridge strength");
    cmd->add_option("--tau-start", tau_start, "initial sampling temperature");
    cmd->add_option("--tau-end", tau_end, "final sampling temperature");
    cmd->add_option("--collect-episodes", collect_episodes,
                    "disagreement-ranked episodes gathered per refit");
    cmd->add_option("--graph-samples", graph_samples, "graphs sampled per episode");
  }

  causim_intervention_options options() const {
    causim_intervention_options opt{};
    opt.ridge = ridge;
    opt.tau_start = tau_start;
    opt.tau_end = tau_end;
    opt.collect_episodes = collect_episodes;
    opt.graph_samples = graph_samples;
    return opt;
  }
};

// Scenario source shared by commands that need an environment: either a
// scenario file or a demo file carrying its scenario.
struct ScenarioFlags {
  std::string scenario_path;
  std::string demos_path;

  void attach(CLI::App* cmd) {
    auto* a = cmd->add_option("--scenario", scenario_path, "scenario file");
    auto* b = cmd->add_option("--demos-scenario", demos_path,
                              "demo file whose embedded scenario to use");
    a->excludes(b);
  }

  causim_status load(ScenarioPtr* out) const {
    if (!scenario_path.empty()) {
      causim_scenario* sc = nullptr;
      const causim_status st = causim_scenario_load(scenario_path.c_str(), &sc);
      if (st == CAUSIM_OK) out->reset(sc);
      return st;
    }
    if (!demos_path.empty()) {
      causim_demos* demos = nullptr;
      causim_status st = causim_demos_load(demos_path.c_str(), &demos);
      if (st != CAUSIM_OK) return st;
      DemosPtr guard = make_demos(demos);
      causim_scenario* sc = nullptr;
      st = causim_demos_scenario(demos, &sc);
      if (st == CAUSIM_OK) out->reset(sc);
      return st;
    }
    std::fprintf(stderr, "error: pass --scenario or --demos-scenario\n");
    return CAUSIM_INVALID_ARGUMENT;
  }
};

int cmd_demo_collect(const std::string& kind, std::uint64_t scenario_seed, int transitions,
                     std::uint64_t seed, const std::string& out,
                     const std::string& scenario_out) {
  ScenarioPtr sc = make_scenario();
  {
    causim_scenario* p = nullptr;
    const causim_status st = causim_scenario_create(kind.c_str(), scenario_seed, &p);
    if (st != CAUSIM_OK) return fail(st);
    sc.reset(p);
  }
  DemosPtr demos = make_demos();
  {
    causim_demos* p = nullptr;
    const causim_status st = causim_demos_collect(sc.get(), transitions, seed, &p);
    if (st != CAUSIM_OK) return fail(st);
    demos.reset(p);
  }
  causim_status st = causim_demos_save(demos.get(), out.c_str());
  if (st != CAUSIM_OK) return fail(st);
  if (!scenario_out.empty()) {
    st = causim_scenario_save(sc.get(), scenario_out.c_str());
    if (st != CAUSIM_OK) return fail(st);
  }
  std::printf("transitions %d\n", causim_demos_count(demos.get()));
  return kExitOk;
}

int cmd_train_bc(const std::string& demos_path, const std::string& out, const TrainFlags& train,
                 int eval_episodes, std::uint64_t eval_seed) {
  DemosPtr demos = make_demos();
  {
    causim_demos* p = nullptr;
    const causim_status st = causim_demos_load(demos_path.c_str(), &p);
    if (st != CAUSIM_OK) return fail(st);
    demos.reset(p);
  }
  PolicyPtr policy = make_policy();
  {
    const causim_train_options opt = train.options();
    causim_policy* p = nullptr;
    const causim_status st = causim_train_bc(demos.get(), &opt, &p);
    if (st != CAUSIM_OK) return fail(st);
    policy.reset(p);
  }
  causim_status st = causim_policy_save(policy.get(), out.c_str());
  if (st != CAUSIM_OK) return fail(st);
  if (eval_episodes > 0) {
    ScenarioPtr sc = make_scenario();
    causim_scenario* p = nullptr;
    st = causim_demos_scenario(demos.get(), &p);
    if (st != CAUSIM_OK) return fail(st);
    sc.reset(p);
    double ret = 0.0;
    st = causim_policy_eval(policy.get(), sc.get(), eval_episodes, eval_seed, &ret);
    if (st != CAUSIM_OK) return fail(st);
    std::printf("mean_return %.6f\n", ret);
  }
  return kExitOk;
}

int cmd_train_graph_policy(const std::string& demos_path, const std::string& out,
                           const TrainFlags& train, const std::string& eval_mask,
                           int eval_episodes, std::uint64_t eval_seed) {
  DemosPtr demos = make_demos();
  {
    causim_demos* p = nullptr;
    const causim_status st = causim_demos_load(demos_path.c_str(), &p);
    if (st != CAUSIM_OK) return fail(st);
    demos.reset(p);
  }
  GraphPolicyPtr gp = make_graph_policy();
  {
    const causim_train_options opt = train.options();
    causim_graph_policy* p = nullptr;
    const causim_status st = causim_train_graph_policy(demos.get(), &opt, &p);
    if (st != CAUSIM_OK) return fail(st);
    gp.reset(p);
  }
  causim_status st = causim_graph_policy_save(gp.get(), out.c_str());
  if (st != CAUSIM_OK) return fail(st);
  if (!eval_mask.empty() && eval_episodes > 0) {
    ScenarioPtr sc = make_scenario();
    causim_scenario* p = nullptr;
    st = causim_demos_scenario(demos.get(), &p);
    if (st != CAUSIM_OK) return fail(st);
    sc.reset(p);
    double ret = 0.0;
    st = causim_graph_policy_eval(gp.get(), eval_mask.c_str(), sc.get(), eval_episodes,
                                  eval_seed, &ret);
    if (st != CAUSIM_OK) return fail(st);
    std::printf("mask %s mean_return %.6f\n", eval_mask.c_str(), ret);
  }
  return kExitOk;
}

int cmd_intervene(bool query_mode, const std::string& policy_path,
                  const ScenarioFlags& scenario_flags, int episodes, int budget,
                  std::uint64_t seed, const InterventionFlags& flags, const std::string& trace,
                  int eval_episodes, std::uint64_t eval_seed) {
  GraphPolicyPtr gp = make_graph_policy();
  {
    causim_graph_policy* p = nullptr;
    const causim_status st = causim_graph_policy_load(policy_path.c_str(), &p);
    if (st != CAUSIM_OK) return fail(st);
    gp.reset(p);
  }
  ScenarioPtr sc = make_scenario();
  {
    const causim_status st = scenario_flags.load(&sc);
    if (st != CAUSIM_OK) return st == CAUSIM_INVALID_ARGUMENT ? kExitConfig : fail(st);
  }
  const causim_intervention_options opt = flags.options();
  char mode[64];
  if (query_mode) {
    int used = 0;
    const causim_status st =
        causim_intervene_query(gp.get(), sc.get(), budget, seed, &opt,
                               trace.empty() ? nullptr : trace.c_str(), mode, sizeof mode, &used);
    if (st != CAUSIM_OK) return fail(st);
    std::printf("mode %s\nqueries_used %d\n", mode, used);
  } else {
    const causim_status st =
        causim_intervene_exec(gp.get(), sc.get(), episodes, seed, &opt,
                              trace.empty() ? nullptr : trace.c_str(), mode, sizeof mode);
    if (st != CAUSIM_OK) return fail(st);
    std::printf("mode %s\n", mode);
  }
  if (eval_episodes > 0) {
    double ret = 0.0;
    const causim_status st =
        causim_graph_policy_eval(gp.get(), mode, sc.get(), eval_episodes, eval_seed, &ret);
    if (st != CAUSIM_OK) return fail(st);
    std::printf("mode_return %.6f\n", ret);
  }
  return kExitOk;
}

int cmd_discover_passive(const std::string& demos_path, int samples, int neighbors,
                         const std::string& out) {
  DemosPtr demos = make_demos();
  {
    causim_demos* p = nullptr;
    const causim_status st = causim_demos_load(demos_path.c_str(), &p);
    if (st != CAUSIM_OK) return fail(st);
    demos.reset(p);
  }
  const causim_status st = causim_mi_report(demos.get(), samples, neighbors, out.c_str());
  if (st != CAUSIM_OK) return fail(st);
  std::printf("report %s\n", out.c_str());
  return kExitOk;
}

int cmd_discover_variational(const std::string& demos_path, int latent_dim, int steps,
                             int batch_size, double learning_rate, double prior_strength,
                             double gumbel_tau, std::uint64_t seed, const std::string& ckpt) {
  DemosPtr demos = make_demos();
  {
    causim_demos* p = nullptr;
    const causim_status st = causim_demos_load(demos_path.c_str(), &p);
    if (st != CAUSIM_OK) return fail(st);
    demos.reset(p);
  }
  causim_variational_options opt{};
  opt.latent_dim = latent_dim;
  opt.steps = steps;
  opt.batch_size = batch_size;
  opt.learning_rate = learning_rate;
  opt.prior_strength = prior_strength;
  opt.gumbel_tau = gumbel_tau;
  opt.seed = seed;
  double q[64];
  const causim_status st = causim_discover_variational(
      demos.get(), &opt, ckpt.empty() ? nullptr : ckpt.c_str(), q, 3);
  if (st != CAUSIM_OK) return fail(st);
  std::printf("prior %.6f %.6f %.6f\n", q[0], q[1], q[2]);
  return kExitOk;
}

int cmd_baseline_dagger(const ScenarioFlags& scenario_flags, int iterations, int rollouts,
                        int initial_transitions, int eval_episodes, const TrainFlags& train,
                        std::uint64_t seed, const std::string& curve) {
  ScenarioPtr sc = make_scenario();
  {
    const causim_status st = scenario_flags.load(&sc);
    if (st != CAUSIM_OK) return st == CAUSIM_INVALID_ARGUMENT ? kExitConfig : fail(st);
  }
  const causim_train_options opt = train.options();
  double final_return = 0.0;
  const causim_status st =
      causim_dagger_run(sc.get(), iterations, rollouts, initial_transitions, eval_episodes, &opt,
                        seed, curve.c_str(), &final_return);
  if (st != CAUSIM_OK) return fail(st);
  std::printf("final_return %.6f\n", final_return);
  return kExitOk;
}

int cmd_run(const std::string& config) {
  const causim_status st = causim_run_experiment(config.c_str());
  if (st != CAUSIM_OK) return fail(st);
  std::printf("done\n");
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out) {
  std::vector<const char*> ptrs;
  ptrs.reserve(dirs.size());
  for (const auto& d : dirs) ptrs.push_back(d.c_str());
  const causim_status st =
      causim_report(ptrs.data(), ptrs.size(), out.empty() ? nullptr : out.c_str());
  if (st != CAUSIM_OK) return fail(st);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal imitation benchmark driver"};
  app.require_subcommand(1);
  std::function<int()> action;

  {
    auto* cmd = app.add_subcommand("demo-collect", "roll expert episodes into a demo file");
    auto kind = std::make_shared<std::string>("confounded");
    auto scenario_seed = std::make_shared<std::uint64_t>(0);
    auto transitions = std::make_shared<int>(5000);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    auto scenario_out = std::make_shared<std::string>();
    cmd->add_option("--scenario-kind", *kind,
                    "original | confounded | confounded_entangled");
    cmd->add_option("--scenario-seed", *scenario_seed, "scenario construction seed");
    cmd->add_option("--transitions", *transitions, "minimum transitions to collect");
    cmd->add_option("--seed", *seed, "episode seed");
    cmd->add_option("--out", *out, "demo file to write")->required();
    cmd->add_option("--scenario-out", *scenario_out, "also save the scenario here");
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_demo_collect(*kind, *scenario_seed, *transitions, *seed, *out, *scenario_out);
      };
    });
  }

  {
    auto* cmd = app.add_subcommand("train-bc", "behavioral cloning on a demo file");
    auto demos = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto train = std::make_shared<TrainFlags>();
    auto eval_episodes = std::make_shared<int>(0);
    auto eval_seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--demos", *demos, "demo file")->required();
    cmd->add_option("--out", *out, "network checkpoint to write")->required();
    train->attach(cmd);
    cmd->add_option("--eval-episodes", *eval_episodes, "evaluate on this many episodes");
    cmd->add_option("--eval-seed", *eval_seed, "evaluation seed");
    cmd->callback([=, &action] {
      action = [=] { return cmd_train_bc(*demos, *out, *train, *eval_episodes, *eval_seed); };
    });
  }

  {
    auto* cmd = app.add_subcommand("train-graph-policy",
                                   "graph-conditioned mixture policy on a demo file");
    auto demos = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto train = std::make_shared<TrainFlags>();
    auto eval_mask = std::make_shared<std::string>();
    auto eval_episodes = std::make_shared<int>(0);
    auto eval_seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--demos", *demos, "demo file")->required();
    cmd->add_option("--out", *out, "checkpoint to write")->required();
    train->attach(cmd);
    cmd->add_option("--eval-mask", *eval_mask, "bit string to evaluate, e.g. 110");
    cmd->add_option("--eval-episodes", *eval_episodes, "evaluate on this many episodes");
    cmd->add_option("--eval-seed", *eval_seed, "evaluation seed");
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_train_graph_policy(*demos, *out, *train, *eval_mask, *eval_episodes,
                                      *eval_seed);
      };
    });
  }

  {
    auto* cmd = app.add_subcommand("intervene-exec",
                                   "infer the causal mask by policy execution");
    auto policy = std::make_shared<std::string>();
    auto scenario = std::make_shared<ScenarioFlags>();
    auto episodes = std::make_shared<int>(50);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto flags = std::make_shared<InterventionFlags>();
    auto trace = std::make_shared<std::string>();
    auto eval_episodes = std::make_shared<int>(0);
    auto eval_seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--policy", *policy, "graph policy checkpoint")->required();
    scenario->attach(cmd);
    cmd->add_option("--episodes", *episodes, "intervention episodes");
    cmd->add_option("--seed", *seed, "intervention seed");
    flags->attach(cmd);
    cmd->add_option("--trace", *trace, "write the per-episode trace CSV here");
    cmd->add_option("--eval-episodes", *eval_episodes, "evaluate the inferred mask afterwards");
    cmd->add_option("--eval-seed", *eval_seed, "evaluation seed");
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_intervene(false, *policy, *scenario, *episodes, 0, *seed, *flags, *trace,
                             *eval_episodes, *eval_seed);
      };
    });
  }

  {
    auto* cmd = app.add_subcommand("intervene-query",
                                   "infer the causal mask with budgeted expert queries");
    auto policy = std::make_shared<std::string>();
    auto scenario = std::make_shared<ScenarioFlags>();
    auto budget = std::make_shared<int>(20);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto flags = std::make_shared<InterventionFlags>();
    auto trace = std::make_shared<std::string>();
    auto eval_episodes = std::make_shared<int>(0);
    auto eval_seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--policy", *policy, "graph policy checkpoint")->required();
    scenario->attach(cmd);
    cmd->add_option("--budget", *budget, "expert query budget");
    cmd->add_option("--seed", *seed, "intervention seed");
    flags->attach(cmd);
    cmd->add_option("--trace", *trace, "write the per-episode trace CSV here");
    cmd->add_option("--eval-episodes", *eval_episodes, "evaluate the inferred mask afterwards");
    cmd->add_option("--eval-seed", *eval_seed, "evaluation seed");
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_intervene(true, *policy, *scenario, 0, *budget, *seed, *flags, *trace,
                             *eval_episodes, *eval_seed);
      };
    });
  }

  {
    auto* cmd = app.add_subcommand("discover-passive",
                                   "marginal and conditional dependence table");
    auto demos = std::make_shared<std::string>();
    auto samples = std::make_shared<int>(0);
    auto neighbors = std::make_shared<int>(5);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--demos", *demos, "demo file")->required();
    cmd->add_option("--samples", *samples, "paired samples to use (0 = all)");
    cmd->add_option("--neighbors", *neighbors, "nearest neighbors k");
    cmd->add_option("--out", *out, "CSV to write")->required();
    cmd->callback([=, &action] {
      action = [=] { return cmd_discover_passive(*demos, *samples, *neighbors, *out); };
    });
  }

  {
    auto* cmd = app.add_subcommand("discover-variational",
                                   "variational graph posterior over observation dims");
    auto demos = std::make_shared<std::string>();
    auto latent_dim = std::make_shared<int>(0);
    auto steps = std::make_shared<int>(0);
    auto batch_size = std::make_shared<int>(0);
    auto learning_rate = std::make_shared<double>(0.0);
    auto prior_strength = std::make_shared<double>(0.0);
    auto gumbel_tau = std::make_shared<double>(0.0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto ckpt = std::make_shared<std::string>();
    cmd->add_option("--demos", *demos, "demo file")->required();
    cmd->add_option("--latent-dim", *latent_dim, "latent size");
    cmd->add_option("--steps", *steps, "optimization steps");
    cmd->add_option("--batch-size", *batch_size, "minibatch size");
    cmd->add_option("--learning-rate", *learning_rate, "optimizer step size");
    cmd->add_option("--prior-strength", *prior_strength,
                    "sparsity strength (negative forces zero)");
    cmd->add_option("--gumbel-tau", *gumbel_tau, "relaxation temperature");
    cmd->add_option("--seed", *seed, "training seed");
    cmd->add_option("--ckpt", *ckpt, "checkpoint to write");
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_discover_variational(*demos, *latent_dim, *steps, *batch_size, *learning_rate,
                                        *prior_strength, *gumbel_tau, *seed, *ckpt);
      };
    });
  }

  {
    auto* cmd = app.add_subcommand("baseline-dagger", "interactive imitation baseline");
    auto scenario = std::make_shared<ScenarioFlags>();
    auto iterations = std::make_shared<int>(4);
    auto rollouts = std::make_shared<int>(3);
    auto initial_transitions = std::make_shared<int>(5000);
    auto eval_episodes = std::make_shared<int>(20);
    auto train = std::make_shared<TrainFlags>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto curve = std::make_shared<std::string>();
    scenario->attach(cmd);
    cmd->add_option("--iterations", *iterations, "aggregation iterations");
    cmd->add_option("--rollouts-per-iter", *rollouts, "labeled rollouts per iteration");
    cmd->add_option("--initial-transitions", *initial_transitions, "iteration-zero demo size");
    cmd->add_option("--eval-episodes", *eval_episodes, "episodes per evaluation point");
    train->attach(cmd);
    cmd->add_option("--run-seed", *seed, "run seed");
    cmd->add_option("--curve", *curve, "query/return curve CSV to write")->required();
    cmd->callback([=, &action] {
      action = [=] {
        return cmd_baseline_dagger(*scenario, *iterations, *rollouts, *initial_transitions,
                                   *eval_episodes, *train, *seed, *curve);
      };
    });
  }

  {
    auto* cmd = app.add_subcommand("run", "execute an experiment config across seeds");
    auto config = std::make_shared<std::string>();
    cmd->add_option("--config", *config, "key-value experiment config file")->required();
    cmd->callback([=, &action] { action = [=] { return cmd_run(*config); }; });
  }

  {
    auto* cmd = app.add_subcommand("report",
                                   "merged summary and acceptance checklist over result dirs");
    auto dirs = std::make_shared<std::vector<std::string>>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("dirs", *dirs, "result directories");
    cmd->add_option("--out", *out, "write the report here instead of stdout");
    cmd->callback([=, &action] { action = [=] { return cmd_report(*dirs, *out); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  return action ? action() : kExitConfig;
}
