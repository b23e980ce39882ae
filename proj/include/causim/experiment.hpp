#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "causim/dagger.hpp"
#include "causim/discovery.hpp"
#include "causim/intervention.hpp"
#include "causim/policy.hpp"

namespace causim {

// Flat key-value configuration: one "section.key = value" pair per line,
// '#' starts a comment, lists are space separated.
struct KvConfig {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  // Canonical form: sorted keys, single spaces, trailing newline.
  std::string canonical() const;
};

KvConfig parse_kv(std::istream& in);
KvConfig parse_kv_file(const std::string& path);

// Carries every field that failed validation, joined into what().
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, std::vector<std::string> fields);
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

enum class ExperimentKind {
  kGapCurve,
  kPolicyExecIntervention,
  kExpertQueryIntervention,
  kPassiveDiscovery,
  kVariationalPrior,
  kDaggerCurve,
  kEntangledAblation,
  kPropositionSuite,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kGapCurve;
  std::string output_dir;
  std::vector<std::uint64_t> seeds;
  std::uint64_t scenario_seed = 0;

  int demo_transitions = 5000;
  int eval_episodes = 20;
  TrainConfig train;

  std::vector<int> gap_sizes = {500, 1000, 2000, 5000};

  InterventionConfig intervention;
  int intervention_episodes = 50;
  int query_budget = 20;

  int mi_samples = 10000;
  int mi_neighbors = 5;

  VariationalConfig variational;

  int dagger_iterations = 4;
  int dagger_rollouts = 3;

  int proposition_trials = 100;

  std::string snapshot;  // canonical form of the parsed key-value source
};

// Throws ConfigError naming every offending field at once.
ExperimentConfig validate_config(const KvConfig& kv);

struct MetricRow {
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

struct ResultBundle {
  ExperimentKind kind = ExperimentKind::kGapCurve;
  std::string snapshot;
  std::vector<MetricRow> rows;
};

// Executes the configured experiment across seeds (fanned out over worker
// threads), writing result.csv, summary.txt, config.snapshot, meta.txt and
// per-seed artifact directories under output_dir. On a mid-run failure the
// completed rows are still written next to a FAILED marker before the error
// propagates.
ResultBundle run_experiment(const ExperimentConfig& config);

ResultBundle load_bundle(const std::string& dir);

void write_result_csv(const ResultBundle& bundle, std::ostream& out);
void write_summary(const ResultBundle& bundle, std::ostream& out);

enum class Verdict { kPass, kFail, kMissing };

struct CriterionResult {
  std::string id;
  std::string description;
  Verdict verdict = Verdict::kMissing;
  std::string detail;
};

// One row per acceptance criterion, evaluated from whichever bundles are
// present; the two purely numerical criteria are recomputed in place.
std::vector<CriterionResult> acceptance_checklist(const std::vector<ResultBundle>& bundles);

// Merged cross-experiment summary plus the checklist. Empty input writes an
// empty document.
void write_report(const std::vector<ResultBundle>& bundles, std::ostream& out);
void write_report_file(const std::vector<std::string>& bundle_dirs, const std::string& path);

}  // namespace causim
