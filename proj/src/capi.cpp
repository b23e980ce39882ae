#include "causim/causim.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "causim/dagger.hpp"
#include "causim/discovery.hpp"
#include "causim/env.hpp"
#include "causim/experiment.hpp"
#include "causim/expert.hpp"
#include "causim/intervention.hpp"
#include "causim/policy.hpp"

struct causim_scenario {
  causim::Scenario value;
};
struct causim_demos {
  causim::DemoSet value;
};
struct causim_policy {
  causim::Network value;
};
struct causim_graph_policy {
  causim::GraphPolicy value;
};

namespace {

thread_local std::string g_last_error;

causim_status classify(const std::exception& e) {
  if (dynamic_cast<const causim::ConfigError*>(&e)) return CAUSIM_CONFIG_ERROR;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return CAUSIM_INVALID_ARGUMENT;
  if (dynamic_cast<const std::domain_error*>(&e)) return CAUSIM_INVALID_ARGUMENT;
  const std::string what = e.what();
  for (const char* prefix : {"cannot open", "write failed", "not a", "truncated",
                             "unexpected result schema", "config snapshot lacks", "demo file",
                             "malformed result row"})
    if (what.rfind(prefix, 0) == 0) return CAUSIM_IO_ERROR;
  if (what.find("diverged") != std::string::npos) return CAUSIM_NUMERIC_ERROR;
  return CAUSIM_RUNTIME_ERROR;
}

template <typename Fn>
causim_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CAUSIM_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return classify(e);
  } catch (...) {
    g_last_error = "unknown failure";
    return CAUSIM_RUNTIME_ERROR;
  }
}

causim_status fail_invalid(const char* message) {
  g_last_error = message;
  return CAUSIM_INVALID_ARGUMENT;
}

causim::TrainConfig to_train_config(const causim_train_options* opt) {
  causim::TrainConfig tc;
  if (!opt) return tc;
  if (opt->epochs > 0) tc.epochs = opt->epochs;
  if (opt->batch_size > 0) tc.batch_size = opt->batch_size;
  if (opt->learning_rate > 0.0) tc.learning_rate = opt->learning_rate;
  if (opt->val_fraction > 0.0) tc.val_fraction = opt->val_fraction;
  tc.seed = opt->seed;
  return tc;
}

causim::InterventionConfig to_intervention_config(const causim_intervention_options* opt) {
  causim::InterventionConfig ic;
  if (!opt) return ic;
  if (opt->ridge > 0.0) ic.ridge = opt->ridge;
  if (opt->tau_start > 0.0) ic.tau_start = opt->tau_start;
  if (opt->tau_end > 0.0) ic.tau_end = opt->tau_end;
  if (opt->collect_episodes > 0) ic.collect_episodes = opt->collect_episodes;
  if (opt->graph_samples > 0) ic.graph_samples = opt->graph_samples;
  return ic;
}

causim::VariationalConfig to_variational_config(const causim_variational_options* opt) {
  causim::VariationalConfig vc;
  vc.prior_strength = 0.1;
  if (!opt) return vc;
  if (opt->latent_dim > 0) vc.latent_dim = opt->latent_dim;
  if (opt->steps > 0) vc.steps = opt->steps;
  if (opt->batch_size > 0) vc.batch_size = opt->batch_size;
  if (opt->learning_rate > 0.0) vc.learning_rate = opt->learning_rate;
  if (opt->prior_strength > 0.0) vc.prior_strength = opt->prior_strength;
  if (opt->prior_strength < 0.0) vc.prior_strength = 0.0;
  if (opt->gumbel_tau > 0.0) vc.gumbel_tau = opt->gumbel_tau;
  vc.seed = opt->seed;
  return vc;
}

causim_status copy_mask(const causim::CausalGraph& mask, char* buf, size_t buf_len) {
  const std::string text = mask.to_string();
  if (buf_len < text.size() + 1) return fail_invalid("mask buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return CAUSIM_OK;
}

}  // namespace

extern "C" {

const char* causim_version(void) { return "1.0.0"; }

const char* causim_last_error(void) { return g_last_error.c_str(); }

causim_status causim_scenario_create(const char* kind, uint64_t seed, causim_scenario** out) {
  if (!kind || !out) return fail_invalid("kind and out must be non-NULL");
  return guarded([&] {
    *out = new causim_scenario{
        causim::Scenario::make(causim::parse_scenario_kind(kind), seed)};
  });
}

causim_status causim_scenario_save(const causim_scenario* sc, const char* path) {
  if (!sc || !path) return fail_invalid("scenario and path must be non-NULL");
  return guarded([&] {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error(std::string("cannot open for writing: ") + path);
    causim::write_scenario(sc->value, outf);
    if (!outf) throw std::runtime_error(std::string("write failed: ") + path);
  });
}

causim_status causim_scenario_load(const char* path, causim_scenario** out) {
  if (!path || !out) return fail_invalid("path and out must be non-NULL");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string("cannot open: ") + path);
    *out = new causim_scenario{causim::read_scenario(in)};
  });
}

causim_status causim_scenario_true_mask(const causim_scenario* sc, char* buf, size_t buf_len) {
  if (!sc || !buf) return fail_invalid("scenario and buf must be non-NULL");
  return copy_mask(causim::scenario_true_mask(sc->value), buf, buf_len);
}

void causim_scenario_destroy(causim_scenario* sc) { delete sc; }

causim_status causim_demos_collect(const causim_scenario* sc, int min_transitions, uint64_t seed,
                                   causim_demos** out) {
  if (!sc || !out) return fail_invalid("scenario and out must be non-NULL");
  return guarded([&] {
    *out = new causim_demos{causim::collect_demo_transitions(sc->value, min_transitions, seed)};
  });
}

causim_status causim_demos_save(const causim_demos* demos, const char* path) {
  if (!demos || !path) return fail_invalid("demos and path must be non-NULL");
  return guarded([&] { causim::save_demos(demos->value, path); });
}

causim_status causim_demos_load(const char* path, causim_demos** out) {
  if (!path || !out) return fail_invalid("path and out must be non-NULL");
  return guarded([&] { *out = new causim_demos{causim::load_demos_file(path)}; });
}

int causim_demos_count(const causim_demos* demos) {
  return demos ? static_cast<int>(demos->value.transitions.size()) : 0;
}

causim_status causim_demos_scenario(const causim_demos* demos, causim_scenario** out) {
  if (!demos || !out) return fail_invalid("demos and out must be non-NULL");
  return guarded([&] { *out = new causim_scenario{demos->value.scenario}; });
}

void causim_demos_destroy(causim_demos* demos) { delete demos; }

causim_status causim_train_bc(const causim_demos* demos, const causim_train_options* opt,
                              causim_policy** out) {
  if (!demos || !out) return fail_invalid("demos and out must be non-NULL");
  return guarded([&] {
    *out = new causim_policy{causim::train_bc(demos->value, to_train_config(opt))};
  });
}

causim_status causim_policy_eval(const causim_policy* policy, const causim_scenario* sc,
                                 int episodes, uint64_t seed, double* mean_return) {
  if (!policy || !sc || !mean_return)
    return fail_invalid("policy, scenario and mean_return must be non-NULL");
  return guarded([&] {
    *mean_return = causim::eval_bc(policy->value, sc->value, episodes, seed).mean_return;
  });
}

causim_status causim_policy_save(const causim_policy* policy, const char* path) {
  if (!policy || !path) return fail_invalid("policy and path must be non-NULL");
  return guarded([&] { causim::save_network(policy->value, path); });
}

causim_status causim_policy_load(const char* path, causim_policy** out) {
  if (!path || !out) return fail_invalid("path and out must be non-NULL");
  return guarded([&] { *out = new causim_policy{causim::load_network_file(path)}; });
}

void causim_policy_destroy(causim_policy* policy) { delete policy; }

causim_status causim_train_graph_policy(const causim_demos* demos,
                                        const causim_train_options* opt,
                                        causim_graph_policy** out) {
  if (!demos || !out) return fail_invalid("demos and out must be non-NULL");
  return guarded([&] {
    *out = new causim_graph_policy{causim::train_graph_policy(demos->value, to_train_config(opt))};
  });
}

causim_status causim_graph_policy_eval(const causim_graph_policy* gp, const char* mask_bits,
                                       const causim_scenario* sc, int episodes, uint64_t seed,
                                       double* mean_return) {
  if (!gp || !mask_bits || !sc || !mean_return)
    return fail_invalid("gp, mask_bits, scenario and mean_return must be non-NULL");
  return guarded([&] {
    const causim::CausalGraph mask = causim::CausalGraph::from_string(mask_bits);
    *mean_return =
        causim::eval_graph_policy(gp->value, mask, sc->value, episodes, seed).mean_return;
  });
}

causim_status causim_graph_policy_save(const causim_graph_policy* gp, const char* path) {
  if (!gp || !path) return fail_invalid("gp and path must be non-NULL");
  return guarded([&] { causim::save_graph_policy(gp->value, path); });
}

causim_status causim_graph_policy_load(const char* path, causim_graph_policy** out) {
  if (!path || !out) return fail_invalid("path and out must be non-NULL");
  return guarded([&] { *out = new causim_graph_policy{causim::load_graph_policy(path)}; });
}

void causim_graph_policy_destroy(causim_graph_policy* gp) { delete gp; }

causim_status causim_intervene_exec(const causim_graph_policy* gp, const causim_scenario* sc,
                                    int episodes, uint64_t seed,
                                    const causim_intervention_options* opt,
                                    const char* trace_path, char* mode_buf, size_t mode_buf_len) {
  if (!gp || !sc || !mode_buf) return fail_invalid("gp, scenario and mode_buf must be non-NULL");
  causim::InterventionResult result;
  const causim_status status = guarded([&] {
    const causim::InterventionConfig ic = to_intervention_config(opt);
    const causim::EnergyModel em0 = causim::EnergyModel::uniform(gp->value.n, ic.tau_start);
    result = causim::policy_execution_intervention(gp->value, sc->value, episodes, em0, seed, ic);
    if (trace_path) causim::write_trace(result.trace, trace_path);
  });
  if (status != CAUSIM_OK) return status;
  return copy_mask(result.mode, mode_buf, mode_buf_len);
}

causim_status causim_intervene_query(const causim_graph_policy* gp, const causim_scenario* sc,
                                     int budget, uint64_t seed,
                                     const causim_intervention_options* opt,
                                     const char* trace_path, char* mode_buf, size_t mode_buf_len,
                                     int* queries_used) {
  if (!gp || !sc || !mode_buf) return fail_invalid("gp, scenario and mode_buf must be non-NULL");
  causim::InterventionResult result;
  causim::ExpertQuery expert;
  const causim_status status = guarded([&] {
    const causim::InterventionConfig ic = to_intervention_config(opt);
    const causim::EnergyModel em0 = causim::EnergyModel::uniform(gp->value.n, ic.tau_start);
    result =
        causim::expert_query_intervention(gp->value, sc->value, expert, budget, em0, seed, ic);
    if (trace_path) causim::write_trace(result.trace, trace_path);
  });
  if (status != CAUSIM_OK) return status;
  if (queries_used) *queries_used = static_cast<int>(expert.count());
  return copy_mask(result.mode, mode_buf, mode_buf_len);
}

causim_status causim_mi_report(const causim_demos* demos, int samples, int neighbors,
                               const char* csv_path) {
  if (!demos || !csv_path) return fail_invalid("demos and csv_path must be non-NULL");
  return guarded([&] {
    std::vector<causim::MISample> mi = causim::mi_samples_from_demos(demos->value);
    if (samples > 0) {
      if (static_cast<std::size_t>(samples) > mi.size())
        throw std::invalid_argument("requested more samples than the demo set provides");
      mi.resize(static_cast<std::size_t>(samples));
    }
    const int k = neighbors > 0 ? neighbors : 5;
    causim::write_mi_report(causim::mi_report(mi, k), csv_path);
  });
}

causim_status causim_discover_variational(const causim_demos* demos,
                                          const causim_variational_options* opt,
                                          const char* ckpt_path, double* q, size_t q_len) {
  if (!demos || !q) return fail_invalid("demos and q must be non-NULL");
  return guarded([&] {
    const causim::VariationalConfig vc = to_variational_config(opt);
    const causim::VariationalModel model = causim::train_variational(demos->value, vc);
    if (ckpt_path) causim::save_variational(model, ckpt_path);
    const std::vector<double> marginals =
        causim::discovered_prior(model, 2000, causim::derive_seed(vc.seed, 77));
    if (q_len < marginals.size()) throw std::invalid_argument("q buffer too small");
    for (std::size_t i = 0; i < marginals.size(); ++i) q[i] = marginals[i];
  });
}

causim_status causim_dagger_run(const causim_scenario* sc, int iterations, int rollouts_per_iter,
                                int initial_min_transitions, int eval_episodes,
                                const causim_train_options* opt, uint64_t seed,
                                const char* curve_csv_path, double* final_return) {
  if (!sc) return fail_invalid("scenario must be non-NULL");
  return guarded([&] {
    causim::DaggerConfig dc;
    if (initial_min_transitions > 0) dc.initial_min_transitions = initial_min_transitions;
    if (eval_episodes > 0) dc.eval_episodes = eval_episodes;
    dc.train = to_train_config(opt);
    causim::ExpertQuery expert;
    const causim::DaggerResult result =
        causim::dagger_run(sc->value, expert, iterations, rollouts_per_iter, dc, seed);
    if (curve_csv_path) causim::write_dagger_curve(result.curve, curve_csv_path);
    if (final_return) *final_return = result.curve.back().mean_return;
  });
}

causim_status causim_run_experiment(const char* config_path) {
  if (!config_path) return fail_invalid("config_path must be non-NULL");
  return guarded([&] {
    const causim::KvConfig kv = causim::parse_kv_file(config_path);
    causim::run_experiment(causim::validate_config(kv));
  });
}

causim_status causim_report(const char* const* bundle_dirs, size_t count, const char* out_path) {
  if (count > 0 && !bundle_dirs) return fail_invalid("bundle_dirs must be non-NULL");
  return guarded([&] {
    std::vector<causim::ResultBundle> bundles;
    for (size_t i = 0; i < count; ++i) {
      if (!bundle_dirs[i]) throw std::invalid_argument("bundle_dirs entries must be non-NULL");
      bundles.push_back(causim::load_bundle(bundle_dirs[i]));
    }
    if (out_path) {
      std::ofstream outf(out_path);
      if (!outf) throw std::runtime_error(std::string("cannot open for writing: ") + out_path);
      causim::write_report(bundles, outf);
      if (!outf) throw std::runtime_error(std::string("write failed: ") + out_path);
    } else {
      causim::write_report(bundles, std::cout);
    }
  });
}

}  // extern "C"
