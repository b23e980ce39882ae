#include "causim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "causim/parallel.hpp"
#include "causim/stats.hpp"

namespace causim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string squeeze_spaces(const std::string& s) {
  std::string out;
  bool in_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string KvConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [key, value] : values) out << key << " = " << value << '\n';
  return out.str();
}

KvConfig parse_kv(std::istream& in) {
  KvConfig kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + " is not a key = value pair",
                        {"line " + std::to_string(lineno)});
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = squeeze_spaces(trim(stripped.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + " has an empty key",
                        {"line " + std::to_string(lineno)});
    kv.values[key] = value;
  }
  return kv;
}

KvConfig parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return parse_kv(in);
}

namespace {

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out;
  for (const auto& f : fields) {
    if (!out.empty()) out += "; ";
    out += f;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string message, std::vector<std::string> fields)
    : std::runtime_error(message + (fields.empty() ? "" : " [" + join_fields(fields) + "]")),
      fields_(std::move(fields)) {}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kGapCurve: return "gap_curve";
    case ExperimentKind::kPolicyExecIntervention: return "policy_exec_intervention";
    case ExperimentKind::kExpertQueryIntervention: return "expert_query_intervention";
    case ExperimentKind::kPassiveDiscovery: return "passive_discovery";
    case ExperimentKind::kVariationalPrior: return "variational_prior";
    case ExperimentKind::kDaggerCurve: return "dagger_curve";
    case ExperimentKind::kEntangledAblation: return "entangled_ablation";
    case ExperimentKind::kPropositionSuite: return "proposition_suite";
  }
  throw std::invalid_argument("bad experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::kGapCurve, ExperimentKind::kPolicyExecIntervention,
        ExperimentKind::kExpertQueryIntervention, ExperimentKind::kPassiveDiscovery,
        ExperimentKind::kVariationalPrior, ExperimentKind::kDaggerCurve,
        ExperimentKind::kEntangledAblation, ExperimentKind::kPropositionSuite})
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

namespace {

// Typed key readers that collect every failure instead of stopping at the
// first one.
struct ConfigReader {
  const KvConfig& kv;
  std::vector<std::string> errors;
  std::set<std::string> used;

  bool take(const std::string& key, std::string* raw) {
    used.insert(key);
    auto it = kv.values.find(key);
    if (it == kv.values.end()) return false;
    *raw = it->second;
    return true;
  }

  std::string get_string(const std::string& key, const std::string& def, bool required = false) {
    std::string raw;
    if (!take(key, &raw)) {
      if (required) errors.push_back(key + " (missing)");
      return def;
    }
    if (raw.empty()) errors.push_back(key + " (empty)");
    return raw;
  }

  long long get_int(const std::string& key, long long def, long long min_value) {
    std::string raw;
    if (!take(key, &raw)) return def;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing");
      if (v < min_value) {
        errors.push_back(key + " (must be >= " + std::to_string(min_value) + ")");
        return def;
      }
      return v;
    } catch (const std::exception&) {
      errors.push_back(key + " (not an integer)");
      return def;
    }
  }

  double get_real(const std::string& key, double def, double min_value) {
    std::string raw;
    if (!take(key, &raw)) return def;
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing");
      if (!(v >= min_value)) {
        errors.push_back(key + " (must be >= " + std::to_string(min_value) + ")");
        return def;
      }
      return v;
    } catch (const std::exception&) {
      errors.push_back(key + " (not a number)");
      return def;
    }
  }

  bool get_bool(const std::string& key, bool def) {
    std::string raw;
    if (!take(key, &raw)) return def;
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    errors.push_back(key + " (not a boolean)");
    return def;
  }

  std::vector<long long> get_int_list(const std::string& key, std::vector<long long> def,
                                      long long min_value, bool required = false) {
    std::string raw;
    if (!take(key, &raw)) {
      if (required) errors.push_back(key + " (missing)");
      return def;
    }
    std::vector<long long> out;
    std::istringstream ss(raw);
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t pos = 0;
        const long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        if (v < min_value) throw std::invalid_argument("range");
        out.push_back(v);
      } catch (const std::exception&) {
        errors.push_back(key + " (bad element '" + tok + "')");
        return def;
      }
    }
    if (out.empty()) {
      errors.push_back(key + " (empty list)");
      return def;
    }
    return out;
  }
};

}  // namespace

ExperimentConfig validate_config(const KvConfig& kv) {
  ConfigReader r{kv, {}, {}};
  ExperimentConfig cfg;

  const std::string kind_name = r.get_string("experiment.kind", "", true);
  if (!kind_name.empty()) {
    try {
      cfg.kind = experiment_kind_from_string(kind_name);
    } catch (const std::invalid_argument&) {
      r.errors.push_back("experiment.kind (unknown kind '" + kind_name + "')");
    }
  }
  cfg.output_dir = r.get_string("experiment.output_dir", "", true);

  const std::vector<long long> seeds = r.get_int_list("experiment.seeds", {}, 0, true);
  std::set<long long> distinct(seeds.begin(), seeds.end());
  if (!seeds.empty() && distinct.size() != seeds.size())
    r.errors.push_back("experiment.seeds (duplicate seeds)");
  for (long long s : seeds) cfg.seeds.push_back(static_cast<std::uint64_t>(s));

  cfg.scenario_seed = static_cast<std::uint64_t>(r.get_int("scenario.seed", 0, 0));
  cfg.demo_transitions = static_cast<int>(r.get_int("demos.transitions", 5000, 1));
  cfg.eval_episodes = static_cast<int>(r.get_int("eval.episodes", 20, 1));

  cfg.train.epochs = static_cast<int>(r.get_int("train.epochs", 50, 1));
  cfg.train.batch_size = static_cast<int>(r.get_int("train.batch_size", 128, 1));
  cfg.train.learning_rate = r.get_real("train.learning_rate", 1e-3, 0.0);
  cfg.train.val_fraction = r.get_real("train.val_fraction", 0.1, 0.0);
  {
    std::vector<long long> def(cfg.train.hidden.begin(), cfg.train.hidden.end());
    cfg.train.hidden.clear();
    for (long long h : r.get_int_list("train.hidden", def, 1))
      cfg.train.hidden.push_back(static_cast<int>(h));
  }

  {
    std::vector<long long> def(cfg.gap_sizes.begin(), cfg.gap_sizes.end());
    cfg.gap_sizes.clear();
    for (long long s : r.get_int_list("gap.sizes", def, 1))
      cfg.gap_sizes.push_back(static_cast<int>(s));
  }

  cfg.intervention_episodes = static_cast<int>(r.get_int("intervention.episodes", 50, 1));
  cfg.query_budget = static_cast<int>(r.get_int("intervention.budget", 20, 1));
  cfg.intervention.ridge = r.get_real("intervention.ridge", 1e-3, 0.0);
  cfg.intervention.tau_start = r.get_real("intervention.tau_start", 1.0, 1e-9);
  cfg.intervention.tau_end = r.get_real("intervention.tau_end", 0.1, 1e-9);
  cfg.intervention.collect_episodes =
      static_cast<int>(r.get_int("intervention.collect_episodes", 10, 1));
  cfg.intervention.graph_samples = static_cast<int>(r.get_int("intervention.graph_samples", 60, 1));
  cfg.intervention.random_state_selection =
      r.get_bool("intervention.random_state_selection", false);

  cfg.mi_samples = static_cast<int>(r.get_int("mi.samples", 10000, 100));
  cfg.mi_neighbors = static_cast<int>(r.get_int("mi.neighbors", 5, 1));

  cfg.variational.steps = static_cast<int>(r.get_int("variational.steps", 3000, 1));
  cfg.variational.batch_size = static_cast<int>(r.get_int("variational.batch_size", 64, 1));
  cfg.variational.learning_rate = r.get_real("variational.learning_rate", 1e-3, 0.0);
  cfg.variational.latent_dim = static_cast<int>(r.get_int("variational.latent_dim", 4, 1));
  cfg.variational.prior_strength = r.get_real("variational.prior_strength", 0.1, 0.0);
  cfg.variational.gumbel_tau = r.get_real("variational.gumbel_tau", 1.0, 1e-9);

  cfg.dagger_iterations = static_cast<int>(r.get_int("dagger.iterations", 4, 1));
  cfg.dagger_rollouts = static_cast<int>(r.get_int("dagger.rollouts_per_iter", 3, 1));

  cfg.proposition_trials = static_cast<int>(r.get_int("proposition.trials", 100, 1));

  for (const auto& [key, value] : kv.values)
    if (!r.used.count(key)) r.errors.push_back(key + " (unknown key)");

  if (!r.errors.empty()) throw ConfigError("invalid experiment config", r.errors);

  cfg.snapshot = kv.canonical();
  return cfg;
}

namespace {

namespace fs = std::filesystem;

struct SeedContext {
  const ExperimentConfig& cfg;
  std::uint64_t seed;
  std::string dir;  // per-seed artifact directory
  std::vector<MetricRow> rows;

  void add(const std::string& metric, double value) { rows.push_back({seed, metric, value}); }
};

Scenario seed_scenario(const ExperimentConfig& cfg, std::uint64_t seed, ScenarioKind kind,
                       std::uint64_t salt) {
  return Scenario::make(kind, derive_seed(derive_seed(cfg.scenario_seed, seed), salt));
}

// Raw channel r sits at the observation slot the permutation sends it to.
bool mode_has_raw(const CausalGraph& mode, const Scenario& sc, int raw) {
  for (int i = 0; i < 3; ++i)
    if (sc.dim_permutation[static_cast<std::size_t>(i)] == raw) return mode.bit(i);
  return false;
}

void run_gap_curve(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int max_size = *std::max_element(cfg.gap_sizes.begin(), cfg.gap_sizes.end());
  const ScenarioKind kinds[2] = {ScenarioKind::kOriginal, ScenarioKind::kConfounded};
  for (int k = 0; k < 2; ++k) {
    const Scenario sc = seed_scenario(cfg, ctx.seed, kinds[k], static_cast<std::uint64_t>(k));
    const std::string scen = scenario_kind_name(sc.kind);
    DemoSet full = collect_demo_transitions(sc, max_size, derive_seed(ctx.seed, 1));
    for (std::size_t si = 0; si < cfg.gap_sizes.size(); ++si) {
      const int size = cfg.gap_sizes[si];
      DemoSet demos = full;
      if (static_cast<int>(demos.transitions.size()) > size) demos.transitions.resize(size);
      TrainConfig tc = cfg.train;
      tc.seed = derive_seed(ctx.seed, 100 + static_cast<std::uint64_t>(k) * 32 + si);
      TrainingLog log;
      const Network net = train_bc(demos, tc, &log);
      write_training_log(log, ctx.dir + "/bc_" + scen + "_" + std::to_string(size) + ".csv");

      const double ret =
          eval_bc(net, sc, cfg.eval_episodes, derive_seed(ctx.seed, 200 + static_cast<std::uint64_t>(k)))
              .mean_return;
      std::vector<Transition> train_part, val_part;
      split_transitions(demos.transitions, tc.val_fraction, derive_seed(tc.seed, 9001),
                        &train_part, &val_part);
      const double acc = bc_accuracy(net, val_part.empty() ? demos.transitions : val_part);
      ctx.add("return/" + scen + "/" + std::to_string(size), ret);
      ctx.add("accuracy/" + scen + "/" + std::to_string(size), acc);
    }
  }
}

struct TrainedSetup {
  Scenario scenario;
  DemoSet demos;
  GraphPolicy policy;
};

TrainedSetup trained_setup(SeedContext& ctx, ScenarioKind kind, std::uint64_t scenario_salt) {
  TrainedSetup s;
  s.scenario = seed_scenario(ctx.cfg, ctx.seed, kind, scenario_salt);
  s.demos = collect_demo_transitions(s.scenario, ctx.cfg.demo_transitions,
                                     derive_seed(ctx.seed, 1 + scenario_salt));
  TrainConfig tc = ctx.cfg.train;
  tc.seed = derive_seed(ctx.seed, 2 + scenario_salt);
  s.policy = train_graph_policy(s.demos, tc);
  return s;
}

void run_policy_exec(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  TrainedSetup s = trained_setup(ctx, ScenarioKind::kConfounded, 0);
  save_demos(s.demos, ctx.dir + "/demos.txt");
  save_graph_policy(s.policy, ctx.dir + "/graph_policy.ckpt");

  const EnergyModel em0 = EnergyModel::uniform(3, cfg.intervention.tau_start);
  const InterventionResult res = policy_execution_intervention(
      s.policy, s.scenario, cfg.intervention_episodes, em0, derive_seed(ctx.seed, 3),
      cfg.intervention);
  write_trace(res.trace, ctx.dir + "/trace.csv");

  const double ret = eval_graph_policy(s.policy, res.mode, s.scenario, cfg.eval_episodes,
                                       derive_seed(ctx.seed, 4))
                         .mean_return;
  ctx.add("mode_return", ret);
  ctx.add("episodes", cfg.intervention_episodes);
  ctx.add("mode_includes_position", mode_has_raw(res.mode, s.scenario, 0) ? 1.0 : 0.0);
  ctx.add("mode_includes_velocity", mode_has_raw(res.mode, s.scenario, 1) ? 1.0 : 0.0);
  ctx.add("mode_includes_action_channel", mode_has_raw(res.mode, s.scenario, 2) ? 1.0 : 0.0);
  ctx.add("mode_is_true_mask", res.mode == scenario_true_mask(s.scenario) ? 1.0 : 0.0);
}

void run_expert_query(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  TrainedSetup s = trained_setup(ctx, ScenarioKind::kConfounded, 0);
  save_graph_policy(s.policy, ctx.dir + "/graph_policy.ckpt");

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(ctx.seed, 5);
  const Network bc = train_bc(s.demos, tc);
  const double bc_ret =
      eval_bc(bc, s.scenario, cfg.eval_episodes, derive_seed(ctx.seed, 6)).mean_return;

  ExpertQuery expert;
  const EnergyModel em0 = EnergyModel::uniform(3, cfg.intervention.tau_start);
  const InterventionResult res = expert_query_intervention(
      s.policy, s.scenario, expert, cfg.query_budget, em0, derive_seed(ctx.seed, 3),
      cfg.intervention);
  write_trace(res.trace, ctx.dir + "/trace.csv");

  const double ret = eval_graph_policy(s.policy, res.mode, s.scenario, cfg.eval_episodes,
                                       derive_seed(ctx.seed, 4))
                         .mean_return;
  ctx.add("mode_return", ret);
  ctx.add("bc_confounded_return", bc_ret);
  ctx.add("queries_used", static_cast<double>(expert.count()));
  ctx.add("mode_includes_position", mode_has_raw(res.mode, s.scenario, 0) ? 1.0 : 0.0);
  ctx.add("mode_includes_velocity", mode_has_raw(res.mode, s.scenario, 1) ? 1.0 : 0.0);
  ctx.add("mode_includes_action_channel", mode_has_raw(res.mode, s.scenario, 2) ? 1.0 : 0.0);
}

void run_passive_discovery(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Scenario sc = seed_scenario(cfg, ctx.seed, ScenarioKind::kConfounded, 0);
  DemoSet demos =
      collect_demo_transitions(sc, cfg.mi_samples + 300, derive_seed(ctx.seed, 1));
  std::vector<MISample> samples = mi_samples_from_demos(demos);
  if (static_cast<int>(samples.size()) < cfg.mi_samples)
    throw std::runtime_error("not enough paired samples for the requested mi.samples");
  samples.resize(static_cast<std::size_t>(cfg.mi_samples));
  const std::vector<MIReportRow> rows = mi_report(samples, cfg.mi_neighbors);
  write_mi_report(rows, ctx.dir + "/mi_report.csv");
  for (const auto& row : rows) {
    const int raw = sc.dim_permutation[static_cast<std::size_t>(row.dim)];
    ctx.add("marginal_mi/raw" + std::to_string(raw), row.marginal_mi_bits);
    ctx.add("conditional_mi/raw" + std::to_string(raw), row.conditional_mi_bits);
  }
}

DemoSet synthetic_single_cause(int count, std::uint64_t seed) {
  DemoSet demos;
  demos.scenario = Scenario::make(ScenarioKind::kOriginal, derive_seed(seed, 999));
  demos.seed = seed;
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    Transition tr;
    tr.episode_id = i;
    tr.t = 0;
    tr.x = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    tr.action = tr.x(1) > 0.0 ? 2 : 0;
    demos.transitions.push_back(tr);
  }
  return demos;
}

void write_elbo_csv(const ElboLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "step,elbo\n" << std::setprecision(17);
  for (std::size_t i = 0; i < log.elbo.size(); ++i) out << i << ',' << log.elbo[i] << '\n';
}

int episodes_to_true(const InterventionResult& res, const CausalGraph& truth, int cap) {
  for (const auto& row : res.trace)
    if (row.mode_bits == truth) return row.episode_index + 1;
  return cap + 1;
}

void run_variational_prior(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;

  DemoSet synthetic = synthetic_single_cause(4000, derive_seed(ctx.seed, 50));
  VariationalConfig vc = cfg.variational;
  vc.seed = derive_seed(ctx.seed, 52);
  ElboLog syn_log;
  const VariationalModel syn_model = train_variational(synthetic, vc, &syn_log);
  write_elbo_csv(syn_log, ctx.dir + "/elbo_synthetic.csv");
  const std::vector<double> q_syn = discovered_prior(syn_model, 2000, derive_seed(ctx.seed, 53));
  ctx.add("synthetic_q_true", q_syn[1]);
  ctx.add("synthetic_q_nuisance_max", std::max(q_syn[0], q_syn[2]));
  ctx.add("synthetic_elbo_ok", elbo_non_decreasing(syn_log.elbo) ? 1.0 : 0.0);

  TrainedSetup s = trained_setup(ctx, ScenarioKind::kConfounded, 0);
  vc.seed = derive_seed(ctx.seed, 54);
  ElboLog conf_log;
  const VariationalModel conf_model = train_variational(s.demos, vc, &conf_log);
  save_variational(conf_model, ctx.dir + "/variational.ckpt");
  write_elbo_csv(conf_log, ctx.dir + "/elbo_confounded.csv");
  const std::vector<double> q_conf =
      discovered_prior(conf_model, 2000, derive_seed(ctx.seed, 55));
  for (int i = 0; i < 3; ++i) {
    const int raw = s.scenario.dim_permutation[static_cast<std::size_t>(i)];
    ctx.add("prior_q_raw" + std::to_string(raw), q_conf[static_cast<std::size_t>(i)]);
  }

  const EnergyModel em_uniform = EnergyModel::uniform(3, cfg.intervention.tau_start);
  const EnergyModel em_prior = energy_from_prior(q_conf, cfg.intervention.tau_start);
  const InterventionResult res_u = policy_execution_intervention(
      s.policy, s.scenario, cfg.intervention_episodes, em_uniform, derive_seed(ctx.seed, 30),
      cfg.intervention);
  const InterventionResult res_d = policy_execution_intervention(
      s.policy, s.scenario, cfg.intervention_episodes, em_prior, derive_seed(ctx.seed, 30),
      cfg.intervention);
  write_trace(res_u.trace, ctx.dir + "/trace_uniform.csv");
  write_trace(res_d.trace, ctx.dir + "/trace_discovered.csv");
  ctx.add("episodes_to_true/uniform",
          episodes_to_true(res_u, scenario_true_mask(s.scenario), cfg.intervention_episodes));
  ctx.add("episodes_to_true/discovered",
          episodes_to_true(res_d, scenario_true_mask(s.scenario), cfg.intervention_episodes));
}

void run_dagger_curve(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Scenario sc = seed_scenario(cfg, ctx.seed, ScenarioKind::kConfounded, 1);

  ExpertQuery expert;
  DaggerConfig dc;
  dc.initial_min_transitions = cfg.demo_transitions;
  dc.eval_episodes = cfg.eval_episodes;
  dc.train = cfg.train;
  const DaggerResult res =
      dagger_run(sc, expert, cfg.dagger_iterations, cfg.dagger_rollouts, dc, derive_seed(ctx.seed, 40));
  write_dagger_curve(res.curve, ctx.dir + "/dagger_curve.csv");

  const Scenario sc_orig = seed_scenario(cfg, ctx.seed, ScenarioKind::kOriginal, 0);
  DemoSet demos_o =
      collect_demo_transitions(sc_orig, cfg.demo_transitions, derive_seed(ctx.seed, 1));
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(ctx.seed, 100);
  const Network bc_o = train_bc(demos_o, tc);
  const double orig_ret =
      eval_bc(bc_o, sc_orig, cfg.eval_episodes, derive_seed(ctx.seed, 200)).mean_return;
  ctx.add("original_bc_return", orig_ret);

  double close_at = 1e9;
  for (const auto& pt : res.curve) {
    ctx.add("return/iter" + std::to_string(pt.iteration), pt.mean_return);
    ctx.add("queries/iter" + std::to_string(pt.iteration),
            static_cast<double>(pt.cumulative_queries));
    if (close_at == 1e9 && pt.mean_return >= orig_ret - 15.0)
      close_at = static_cast<double>(pt.cumulative_queries);
  }
  ctx.add("labels_to_close15", close_at);
}

void run_entangled_ablation(SeedContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ScenarioKind kinds[2] = {ScenarioKind::kConfounded, ScenarioKind::kConfoundedEntangled};
  const std::string reps[2] = {"plain", "entangled"};
  for (int k = 0; k < 2; ++k) {
    TrainedSetup s = trained_setup(ctx, kinds[k], static_cast<std::uint64_t>(k));
    const EnergyModel em0 = EnergyModel::uniform(3, cfg.intervention.tau_start);

    const InterventionResult exec = policy_execution_intervention(
        s.policy, s.scenario, cfg.intervention_episodes, em0, derive_seed(ctx.seed, 3),
        cfg.intervention);
    write_trace(exec.trace, ctx.dir + "/trace_exec_" + reps[k] + ".csv");
    const double exec_ret = eval_graph_policy(s.policy, exec.mode, s.scenario, cfg.eval_episodes,
                                              derive_seed(ctx.seed, 4))
                                .mean_return;
    ctx.add("mode_return/exec/" + reps[k], exec_ret);

    ExpertQuery expert;
    const InterventionResult query = expert_query_intervention(
        s.policy, s.scenario, expert, cfg.query_budget, em0, derive_seed(ctx.seed, 5),
        cfg.intervention);
    write_trace(query.trace, ctx.dir + "/trace_query_" + reps[k] + ".csv");
    const double query_ret = eval_graph_policy(s.policy, query.mode, s.scenario,
                                               cfg.eval_episodes, derive_seed(ctx.seed, 6))
                                 .mean_return;
    ctx.add("mode_return/query/" + reps[k], query_ret);
  }
}

void run_proposition_suite(SeedContext& ctx) {
  Rng rng(derive_seed(ctx.seed, 60));
  ctx.add("exhaustive_n2_pass", proposition_check(2, rng) ? 1.0 : 0.0);
  int passes = 0;
  for (int t = 0; t < ctx.cfg.proposition_trials; ++t)
    if (proposition_check(3, rng)) ++passes;
  ctx.add("random_n3_passes", passes);
  ctx.add("random_n3_trials", ctx.cfg.proposition_trials);
}

void run_seed(SeedContext& ctx) {
  switch (ctx.cfg.kind) {
    case ExperimentKind::kGapCurve: run_gap_curve(ctx); return;
    case ExperimentKind::kPolicyExecIntervention: run_policy_exec(ctx); return;
    case ExperimentKind::kExpertQueryIntervention: run_expert_query(ctx); return;
    case ExperimentKind::kPassiveDiscovery: run_passive_discovery(ctx); return;
    case ExperimentKind::kVariationalPrior: run_variational_prior(ctx); return;
    case ExperimentKind::kDaggerCurve: run_dagger_curve(ctx); return;
    case ExperimentKind::kEntangledAblation: run_entangled_ablation(ctx); return;
    case ExperimentKind::kPropositionSuite: run_proposition_suite(ctx); return;
  }
  throw std::logic_error("unhandled experiment kind");
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_result_csv(const ResultBundle& bundle, std::ostream& out) {
  out << "seed,metric,value\n" << std::setprecision(17);
  for (const auto& row : bundle.rows)
    out << row.seed << ',' << row.metric << ',' << row.value << '\n';
}

void write_summary(const ResultBundle& bundle, std::ostream& out) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& row : bundle.rows) groups[row.metric].push_back(row.value);
  out << "metric,count,mean,std,se\n" << std::setprecision(17);
  for (const auto& [metric, values] : groups) {
    const double m = mean(values);
    const double sd = values.size() > 1 ? stddev(values) : 0.0;
    const double se = values.size() > 1 ? standard_error(values) : 0.0;
    out << metric << ',' << values.size() << ',' << m << ',' << sd << ',' << se << '\n';
  }
}

ResultBundle run_experiment(const ExperimentConfig& config) {
  fs::create_directories(config.output_dir);
  std::string snapshot = config.snapshot;
  if (snapshot.find("experiment.kind") == std::string::npos)
    snapshot = "experiment.kind = " + to_string(config.kind) + "\n" + snapshot;
  write_text_file(config.output_dir + "/config.snapshot", snapshot);
  write_text_file(config.output_dir + "/meta.txt",
                  "artifact_version 1\ncreated " + timestamp_utc() + "\n");
  const std::string failed_marker = config.output_dir + "/FAILED";
  std::error_code ec;
  fs::remove(failed_marker, ec);

  const std::size_t count = config.seeds.size();
  std::vector<SeedContext> contexts;
  contexts.reserve(count);
  for (std::uint64_t seed : config.seeds) {
    SeedContext ctx{config, seed, config.output_dir + "/seed" + std::to_string(seed), {}};
    fs::create_directories(ctx.dir);
    contexts.push_back(std::move(ctx));
  }

  std::vector<std::string> failures(count);
  auto worker = [&](int i) {
    try {
      run_seed(contexts[static_cast<std::size_t>(i)]);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] =
          "seed " + std::to_string(contexts[static_cast<std::size_t>(i)].seed) + ": " + e.what();
      contexts[static_cast<std::size_t>(i)].rows.clear();
    }
  };

  // The information estimator parallelizes internally, so its seeds run in
  // sequence instead of fighting it for cores.
  if (config.kind == ExperimentKind::kPassiveDiscovery) {
    for (std::size_t i = 0; i < count; ++i) worker(static_cast<int>(i));
  } else {
    parallel_for(static_cast<int>(count), worker);
  }

  ResultBundle bundle;
  bundle.kind = config.kind;
  bundle.snapshot = config.snapshot;
  for (const auto& ctx : contexts)
    bundle.rows.insert(bundle.rows.end(), ctx.rows.begin(), ctx.rows.end());

  {
    std::ofstream out(config.output_dir + "/result.csv");
    if (!out) throw std::runtime_error("cannot open for writing: " + config.output_dir + "/result.csv");
    write_result_csv(bundle, out);
  }
  {
    std::ofstream out(config.output_dir + "/summary.txt");
    if (!out) throw std::runtime_error("cannot open for writing: " + config.output_dir + "/summary.txt");
    write_summary(bundle, out);
  }

  std::string failure_text;
  for (const auto& f : failures)
    if (!f.empty()) failure_text += f + "\n";
  if (!failure_text.empty()) {
    write_text_file(failed_marker, failure_text);
    throw std::runtime_error("experiment failed for some seeds:\n" + failure_text);
  }
  return bundle;
}

ResultBundle load_bundle(const std::string& dir) {
  ResultBundle bundle;
  {
    std::ifstream in(dir + "/config.snapshot");
    if (!in) throw std::runtime_error("cannot open: " + dir + "/config.snapshot");
    std::string line;
    bool found = false;
    const std::string prefix = "experiment.kind = ";
    while (std::getline(in, line)) {
      bundle.snapshot += line + "\n";
      if (!found && line.rfind(prefix, 0) == 0) {
        bundle.kind = experiment_kind_from_string(trim(line.substr(prefix.size())));
        found = true;
      }
    }
    if (!found) throw std::runtime_error("config snapshot lacks experiment.kind: " + dir);
  }
  {
    std::ifstream in(dir + "/result.csv");
    if (!in) throw std::runtime_error("cannot open: " + dir + "/result.csv");
    std::string line;
    if (!std::getline(in, line) || line != "seed,metric,value")
      throw std::runtime_error("unexpected result schema in " + dir +
                               " (expected header seed,metric,value)");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::size_t c1 = line.find(',');
      const std::size_t c2 = line.rfind(',');
      if (c1 == std::string::npos || c2 == c1)
        throw std::runtime_error("malformed result row in " + dir + ": " + line);
      MetricRow row;
      row.seed = std::stoull(line.substr(0, c1));
      row.metric = line.substr(c1 + 1, c2 - c1 - 1);
      row.value = std::stod(line.substr(c2 + 1));
      bundle.rows.push_back(row);
    }
  }
  return bundle;
}

namespace {

std::vector<double> metric_values(const ResultBundle& bundle, const std::string& metric) {
  std::vector<double> out;
  for (const auto& row : bundle.rows)
    if (row.metric == metric) out.push_back(row.value);
  return out;
}

// Values for two metrics paired by seed, in the first metric's seed order.
bool paired_metrics(const ResultBundle& bundle, const std::string& a, const std::string& b,
                    std::vector<double>* va, std::vector<double>* vb) {
  std::map<std::uint64_t, double> mb;
  for (const auto& row : bundle.rows)
    if (row.metric == b) mb[row.seed] = row.value;
  va->clear();
  vb->clear();
  for (const auto& row : bundle.rows)
    if (row.metric == a) {
      auto it = mb.find(row.seed);
      if (it == mb.end()) return false;
      va->push_back(row.value);
      vb->push_back(it->second);
    }
  return !va->empty();
}

const ResultBundle* find_bundle(const std::vector<ResultBundle>& bundles, ExperimentKind kind) {
  for (const auto& b : bundles)
    if (b.kind == kind) return &b;
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

CriterionResult check_a1(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A1", "clone gap with matched held-out accuracy", Verdict::kMissing, ""};
  const ResultBundle* b = find_bundle(bundles, ExperimentKind::kGapCurve);
  if (!b) {
    r.detail = "needs a gap_curve bundle";
    return r;
  }
  std::vector<double> orig, conf;
  if (!paired_metrics(*b, "return/original/5000", "return/confounded/5000", &orig, &conf)) {
    r.detail = "gap_curve bundle lacks size-5000 returns";
    return r;
  }
  std::vector<double> acc_o = metric_values(*b, "accuracy/original/5000");
  std::vector<double> acc_c = metric_values(*b, "accuracy/confounded/5000");
  const double gap = mean(orig) - mean(conf);
  const double p = wilcoxon_signed_rank_p_greater(orig, conf);
  const double acc_gap = mean(acc_c) - (mean(acc_o) - 0.02);
  const bool pass = gap >= 25.0 && p < 0.01 && acc_gap >= 0.0;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "gap " + fmt(gap) + " (>= 25), p " + fmt(p) + " (< 0.01), accuracy margin " +
             fmt(acc_gap) + " (>= 0)";
  return r;
}

CriterionResult check_a2(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A2", "policy-execution intervention recovers the physical mask",
                    Verdict::kMissing, ""};
  const ResultBundle* b = find_bundle(bundles, ExperimentKind::kPolicyExecIntervention);
  if (!b) {
    r.detail = "needs a policy_exec_intervention bundle";
    return r;
  }
  std::vector<double> pos = metric_values(*b, "mode_includes_position");
  std::vector<double> vel = metric_values(*b, "mode_includes_velocity");
  std::vector<double> act = metric_values(*b, "mode_includes_action_channel");
  std::vector<double> ret = metric_values(*b, "mode_return");
  if (pos.empty() || ret.empty()) {
    r.detail = "bundle lacks mask or return metrics";
    return r;
  }
  int good = 0;
  for (std::size_t i = 0; i < pos.size(); ++i)
    if (pos[i] > 0.5 && vel[i] > 0.5 && act[i] < 0.5) ++good;
  const double frac = static_cast<double>(good) / static_cast<double>(pos.size());
  const double mret = mean(ret);
  const bool pass = frac >= 0.8 && mret >= -157.0 && mret <= -117.0;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "physical-mask fraction " + fmt(frac) + " (>= 0.8), mean mode return " + fmt(mret) +
             " (in [-157, -117])";
  return r;
}

CriterionResult check_a3(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A3", "disentangled beats entangled in both intervention modes",
                    Verdict::kMissing, ""};
  const ResultBundle* b = find_bundle(bundles, ExperimentKind::kEntangledAblation);
  if (!b) {
    r.detail = "needs an entangled_ablation bundle";
    return r;
  }
  const double exec_p = mean(metric_values(*b, "mode_return/exec/plain"));
  const double exec_e = mean(metric_values(*b, "mode_return/exec/entangled"));
  const double query_p = mean(metric_values(*b, "mode_return/query/plain"));
  const double query_e = mean(metric_values(*b, "mode_return/query/entangled"));
  const bool order = exec_p >= exec_e + 5.0 && query_p >= query_e + 5.0;
  const bool magnitude = std::abs(exec_p - (-137.0)) <= 25.0 && std::abs(exec_e - (-145.0)) <= 25.0 &&
                         std::abs(query_p - (-140.0)) <= 25.0 && std::abs(query_e - (-165.0)) <= 25.0;
  r.verdict = (order && magnitude) ? Verdict::kPass : Verdict::kFail;
  r.detail = "exec " + fmt(exec_p) + " vs " + fmt(exec_e) + ", query " + fmt(query_p) + " vs " +
             fmt(query_e) + " (gaps >= 5, cells within 25 of -137/-145/-140/-165)";
  return r;
}

CriterionResult check_a4(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A4", "twenty expert queries beat cloning and DAgger at matched budget",
                    Verdict::kMissing, ""};
  const ResultBundle* q = find_bundle(bundles, ExperimentKind::kExpertQueryIntervention);
  const ResultBundle* d = find_bundle(bundles, ExperimentKind::kDaggerCurve);
  if (!q || !d) {
    r.detail = "needs expert_query_intervention and dagger_curve bundles";
    return r;
  }
  std::vector<double> mode, bc;
  if (!paired_metrics(*q, "mode_return", "bc_confounded_return", &mode, &bc)) {
    r.detail = "query bundle lacks paired returns";
    return r;
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < mode.size(); ++i) diffs.push_back(mode[i] - bc[i]);
  const double med_gain = median(diffs);

  std::vector<double> budgets = metric_values(*q, "queries_used");
  const double budget = budgets.empty() ? 20.0 : *std::max_element(budgets.begin(), budgets.end());
  // Per seed, DAgger's return at the largest query count not exceeding the
  // budget.
  std::map<std::uint64_t, std::map<long, std::pair<double, double>>> by_seed;
  for (const auto& row : d->rows) {
    const std::string qprefix = "queries/iter", rprefix = "return/iter";
    if (row.metric.rfind(qprefix, 0) == 0)
      by_seed[row.seed][std::stol(row.metric.substr(qprefix.size()))].first = row.value;
    else if (row.metric.rfind(rprefix, 0) == 0)
      by_seed[row.seed][std::stol(row.metric.substr(rprefix.size()))].second = row.value;
  }
  std::vector<double> dagger_returns;
  for (const auto& [seed, iters] : by_seed) {
    double best_queries = -1.0, ret = 0.0;
    for (const auto& [iter, qr] : iters)
      if (qr.first <= budget && qr.first > best_queries) {
        best_queries = qr.first;
        ret = qr.second;
      }
    if (best_queries >= 0.0) dagger_returns.push_back(ret);
  }
  std::vector<double> closings = metric_values(*d, "labels_to_close15");

  if (dagger_returns.empty() || closings.empty()) {
    r.detail = "dagger bundle lacks per-iteration rows";
    return r;
  }
  const double med_mode = median(mode);
  const double med_dagger = median(dagger_returns);
  const double med_close = median(closings);
  const bool pass = med_gain >= 20.0 && med_mode > med_dagger && med_close > 100.0;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "median gain over cloning " + fmt(med_gain) + " (>= 20), mode " + fmt(med_mode) +
             " vs dagger " + fmt(med_dagger) + " at budget, labels to close " + fmt(med_close) +
             " (> 100)";
  return r;
}

CriterionResult check_a5(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A5", "passive discovery sees dependence everywhere and conditioning kills it",
                    Verdict::kMissing, ""};
  const ResultBundle* b = find_bundle(bundles, ExperimentKind::kPassiveDiscovery);
  if (!b) {
    r.detail = "needs a passive_discovery bundle";
    return r;
  }
  bool pass = true;
  std::string detail;
  for (int raw = 0; raw < 3; ++raw) {
    std::vector<double> marg = metric_values(*b, "marginal_mi/raw" + std::to_string(raw));
    std::vector<double> cond = metric_values(*b, "conditional_mi/raw" + std::to_string(raw));
    if (marg.empty() || cond.empty()) {
      r.detail = "bundle lacks per-channel information metrics";
      return r;
    }
    const double m = mean(marg), c = mean(cond);
    pass = pass && m > 0.3 && c < 0.1;
    if (!detail.empty()) detail += ", ";
    detail += "raw" + std::to_string(raw) + " " + fmt(m) + "/" + fmt(c);
  }
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = detail + " (marginal > 0.3, conditional < 0.1)";
  return r;
}

CriterionResult check_a6() {
  CriterionResult r{"A6", "energy distribution factorizes exactly and the sampler tracks it",
                    Verdict::kMissing, ""};
  Rng rng(20260815);
  double worst_exact = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(10));
    EnergyModel em;
    em.tau = 0.1 + 1.9 * rng.uniform01();
    em.w = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) em.w(i) = 4.0 * rng.normal();
    const std::vector<double> exact = enumerate_energy_distribution(em);
    double tv = 0.0;
    for (std::size_t gi = 0; gi < exact.size(); ++gi) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) {
        const double p = bit_probability(em, i);
        prod *= (gi & (1ull << i)) ? p : 1.0 - p;
      }
      tv += std::abs(exact[gi] - prod);
    }
    worst_exact = std::max(worst_exact, 0.5 * tv);
  }

  EnergyModel em3;
  em3.tau = 0.7;
  em3.w = Eigen::VectorXd(3);
  em3.w << 0.8, -0.4, 0.1;
  const std::vector<double> exact3 = enumerate_energy_distribution(em3);
  std::vector<double> freq(8, 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    freq[sample_graph(em3, rng).to_index()] += 1.0 / draws;
  double sampler_tv = 0.0;
  for (int gi = 0; gi < 8; ++gi) sampler_tv += std::abs(exact3[static_cast<std::size_t>(gi)] - freq[static_cast<std::size_t>(gi)]);
  sampler_tv *= 0.5;

  const bool pass = worst_exact < 1e-12 && sampler_tv < 0.01;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "worst factorization TV " + fmt(worst_exact) + " (< 1e-12), sampler TV " +
             fmt(sampler_tv) + " (< 0.01)";
  return r;
}

CriterionResult check_a7(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A7", "distinct graphs are separated by some interventional query",
                    Verdict::kMissing, ""};
  const ResultBundle* b = find_bundle(bundles, ExperimentKind::kPropositionSuite);
  if (!b) {
    r.detail = "needs a proposition_suite bundle";
    return r;
  }
  std::vector<double> ex = metric_values(*b, "exhaustive_n2_pass");
  std::vector<double> passes = metric_values(*b, "random_n3_passes");
  std::vector<double> trials = metric_values(*b, "random_n3_trials");
  if (ex.empty() || passes.empty()) {
    r.detail = "bundle lacks proposition metrics";
    return r;
  }
  double total_pass = 0.0, total_trials = 0.0, min_ex = 1.0;
  for (double v : ex) min_ex = std::min(min_ex, v);
  for (double v : passes) total_pass += v;
  for (double v : trials) total_trials += v;
  const bool pass = min_ex >= 1.0 && total_pass == total_trials && total_trials >= 100.0;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "exhaustive n=2 pass, randomized n=3 " + fmt(total_pass) + "/" + fmt(total_trials);
  return r;
}

CriterionResult check_a8() {
  CriterionResult r{"A8", "analytic gradients match finite differences", Verdict::kMissing, ""};
  Rng rng(8152026);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int in = 2 + static_cast<int>(rng.next_below(4));
    const int hid = 3 + static_cast<int>(rng.next_below(6));
    const int out = 2 + static_cast<int>(rng.next_below(3));
    const Activation act = rng.bernoulli(0.5) ? Activation::kTanh : Activation::kRelu;
    const bool ce = rng.bernoulli(0.5);
    Network net = Network::glorot({in, hid, out},
                                  act, ce ? OutputHead::kSoftmax : OutputHead::kLinear, rng);
    Eigen::VectorXd x(in);
    for (int i = 0; i < in; ++i) x(i) = rng.normal();
    Eigen::VectorXd target(out);
    for (int i = 0; i < out; ++i) target(i) = rng.normal();
    const int cls = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(out)));

    auto loss_at = [&]() {
      return ce ? backward(net, x, cls, LossKind::kCrossEntropy).loss
                : backward(net, x, target, LossKind::kMse).loss;
    };
    const GradientBundle g = ce ? backward(net, x, cls, LossKind::kCrossEntropy)
                                : backward(net, x, target, LossKind::kMse);
    const double h = 1e-5;
    for (std::size_t layer = 0; layer < net.weights.size(); ++layer) {
      const int rr = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(net.weights[layer].rows())));
      const int cc = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(net.weights[layer].cols())));
      const double keep = net.weights[layer](rr, cc);
      net.weights[layer](rr, cc) = keep + h;
      const double up = loss_at();
      net.weights[layer](rr, cc) = keep - h;
      const double down = loss_at();
      net.weights[layer](rr, cc) = keep;
      const double fd = (up - down) / (2 * h);
      const double an = g.weight_grads[layer](rr, cc);
      const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  const bool pass = worst < 1e-4;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "worst relative error " + fmt(worst) + " (< 1e-4) over 50 sampled nets";
  return r;
}

CriterionResult check_a9(const std::vector<ResultBundle>& bundles) {
  CriterionResult r{"A9", "variational posterior finds the cause and its prior does not hurt",
                    Verdict::kMissing, ""};
  const ResultBundle* b = find_bundle(bundles, ExperimentKind::kVariationalPrior);
  if (!b) {
    r.detail = "needs a variational_prior bundle";
    return r;
  }
  std::vector<double> qt = metric_values(*b, "synthetic_q_true");
  std::vector<double> qn = metric_values(*b, "synthetic_q_nuisance_max");
  std::vector<double> eu = metric_values(*b, "episodes_to_true/uniform");
  std::vector<double> ed = metric_values(*b, "episodes_to_true/discovered");
  if (qt.empty() || eu.empty() || ed.empty()) {
    r.detail = "bundle lacks variational metrics";
    return r;
  }
  const double med_qt = median(qt), med_qn = median(qn);
  const double med_eu = median(eu), med_ed = median(ed);
  const bool pass = med_qt > 0.9 && med_qn < 0.5 && med_ed <= med_eu;
  r.verdict = pass ? Verdict::kPass : Verdict::kFail;
  r.detail = "q_true " + fmt(med_qt) + " (> 0.9), q_nuisance " + fmt(med_qn) +
             " (< 0.5), episodes-to-true " + fmt(med_ed) + " (discovered) vs " + fmt(med_eu) +
             " (uniform)";
  return r;
}

}  // namespace

std::vector<CriterionResult> acceptance_checklist(const std::vector<ResultBundle>& bundles) {
  return {check_a1(bundles), check_a2(bundles), check_a3(bundles),
          check_a4(bundles), check_a5(bundles), check_a6(),
          check_a7(bundles), check_a8(),        check_a9(bundles)};
}

void write_report(const std::vector<ResultBundle>& bundles, std::ostream& out) {
  if (bundles.empty()) return;
  for (const auto& bundle : bundles) {
    out << "# " << to_string(bundle.kind) << "\n";
    write_summary(bundle, out);
    out << "\n";
  }
  out << "# acceptance checklist\n";
  out << "id,verdict,detail\n";
  for (const auto& c : acceptance_checklist(bundles)) {
    const char* verdict = c.verdict == Verdict::kPass   ? "PASS"
                          : c.verdict == Verdict::kFail ? "FAIL"
                                                        : "MISSING";
    out << c.id << ',' << verdict << ',' << c.detail << '\n';
  }
}

void write_report_file(const std::vector<std::string>& bundle_dirs, const std::string& path) {
  std::vector<ResultBundle> bundles;
  for (const auto& dir : bundle_dirs) bundles.push_back(load_bundle(dir));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_report(bundles, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace causim
