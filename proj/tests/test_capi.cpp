#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "causim/causim.h"

namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

struct ScenarioHandle {
  causim_scenario* p = nullptr;
  ~ScenarioHandle() { causim_scenario_destroy(p); }
};

struct DemosHandle {
  causim_demos* p = nullptr;
  ~DemosHandle() { causim_demos_destroy(p); }
};

causim_train_options quick_train() {
  causim_train_options opt{};
  opt.epochs = 5;
  opt.seed = 7;
  return opt;
}

}  // namespace

TEST_CASE("version and error text are always available") {
  CHECK(std::strlen(causim_version()) > 0);
  CHECK(causim_last_error() != nullptr);
}

TEST_CASE("scenario lifecycle and true mask") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("confounded", 11, &sc.p) == CAUSIM_OK);

  char mask[8];
  REQUIRE(causim_scenario_true_mask(sc.p, mask, sizeof mask) == CAUSIM_OK);
  CHECK(std::strlen(mask) == 3);
  int physical = 0;
  for (const char* c = mask; *c; ++c) physical += *c == '1';
  CHECK(physical == 2);

  char tiny[2];
  CHECK(causim_scenario_true_mask(sc.p, tiny, sizeof tiny) == CAUSIM_INVALID_ARGUMENT);

  const std::string path = temp_path("capi_scenario.txt");
  REQUIRE(causim_scenario_save(sc.p, path.c_str()) == CAUSIM_OK);
  ScenarioHandle loaded;
  REQUIRE(causim_scenario_load(path.c_str(), &loaded.p) == CAUSIM_OK);
  char mask2[8];
  REQUIRE(causim_scenario_true_mask(loaded.p, mask2, sizeof mask2) == CAUSIM_OK);
  CHECK(std::string(mask) == mask2);
}

TEST_CASE("bad scenario kind reports an invalid argument") {
  causim_scenario* sc = nullptr;
  CHECK(causim_scenario_create("weather", 1, &sc) == CAUSIM_INVALID_ARGUMENT);
  CHECK(std::strlen(causim_last_error()) > 0);
  CHECK(sc == nullptr);
  CHECK(causim_scenario_create(nullptr, 1, &sc) == CAUSIM_INVALID_ARGUMENT);
}

TEST_CASE("demos collect, persist and expose their scenario") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("confounded", 3, &sc.p) == CAUSIM_OK);
  DemosHandle demos;
  REQUIRE(causim_demos_collect(sc.p, 400, 5, &demos.p) == CAUSIM_OK);
  CHECK(causim_demos_count(demos.p) >= 400);

  const std::string path = temp_path("capi_demos.txt");
  REQUIRE(causim_demos_save(demos.p, path.c_str()) == CAUSIM_OK);
  DemosHandle loaded;
  REQUIRE(causim_demos_load(path.c_str(), &loaded.p) == CAUSIM_OK);
  CHECK(causim_demos_count(loaded.p) == causim_demos_count(demos.p));

  ScenarioHandle inner;
  REQUIRE(causim_demos_scenario(loaded.p, &inner.p) == CAUSIM_OK);
  char mask[8];
  CHECK(causim_scenario_true_mask(inner.p, mask, sizeof mask) == CAUSIM_OK);

  causim_demos* missing = nullptr;
  CHECK(causim_demos_load(temp_path("capi_nowhere.txt").c_str(), &missing) == CAUSIM_IO_ERROR);
}

TEST_CASE("cloned policy trains, evaluates deterministically and round trips") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("original", 4, &sc.p) == CAUSIM_OK);
  DemosHandle demos;
  REQUIRE(causim_demos_collect(sc.p, 800, 6, &demos.p) == CAUSIM_OK);

  const causim_train_options opt = quick_train();
  causim_policy* policy = nullptr;
  REQUIRE(causim_train_bc(demos.p, &opt, &policy) == CAUSIM_OK);

  double r1 = 0.0, r2 = 0.0;
  REQUIRE(causim_policy_eval(policy, sc.p, 3, 9, &r1) == CAUSIM_OK);
  REQUIRE(causim_policy_eval(policy, sc.p, 3, 9, &r2) == CAUSIM_OK);
  CHECK(r1 == r2);
  CHECK(r1 <= -80.0);

  const std::string path = temp_path("capi_policy.txt");
  REQUIRE(causim_policy_save(policy, path.c_str()) == CAUSIM_OK);
  causim_policy* again = nullptr;
  REQUIRE(causim_policy_load(path.c_str(), &again) == CAUSIM_OK);
  double r3 = 0.0;
  REQUIRE(causim_policy_eval(again, sc.p, 3, 9, &r3) == CAUSIM_OK);
  CHECK(r3 == r1);
  causim_policy_destroy(again);
  causim_policy_destroy(policy);
}

TEST_CASE("graph policy evaluates under an explicit mask") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("confounded", 8, &sc.p) == CAUSIM_OK);
  DemosHandle demos;
  REQUIRE(causim_demos_collect(sc.p, 800, 2, &demos.p) == CAUSIM_OK);

  const causim_train_options opt = quick_train();
  causim_graph_policy* gp = nullptr;
  REQUIRE(causim_train_graph_policy(demos.p, &opt, &gp) == CAUSIM_OK);

  double ret = 0.0;
  REQUIRE(causim_graph_policy_eval(gp, "111", sc.p, 2, 3, &ret) == CAUSIM_OK);
  CHECK(ret <= -80.0);
  CHECK(causim_graph_policy_eval(gp, "abc", sc.p, 2, 3, &ret) == CAUSIM_INVALID_ARGUMENT);
  CHECK(causim_graph_policy_eval(gp, "11", sc.p, 2, 3, &ret) == CAUSIM_INVALID_ARGUMENT);

  const std::string path = temp_path("capi_gp.txt");
  REQUIRE(causim_graph_policy_save(gp, path.c_str()) == CAUSIM_OK);
  causim_graph_policy* again = nullptr;
  REQUIRE(causim_graph_policy_load(path.c_str(), &again) == CAUSIM_OK);
  double ret2 = 0.0;
  REQUIRE(causim_graph_policy_eval(again, "111", sc.p, 2, 3, &ret2) == CAUSIM_OK);
  CHECK(ret2 == ret);

  causim_intervention_options iopt{};
  iopt.collect_episodes = 2;
  iopt.graph_samples = 16;
  char mode[8];
  const std::string trace = temp_path("capi_trace.csv");
  REQUIRE(causim_intervene_exec(gp, sc.p, 3, 21, &iopt, trace.c_str(), mode, sizeof mode) ==
          CAUSIM_OK);
  CHECK(std::strlen(mode) == 3);
  CHECK(fs::exists(trace));

  int used = -1;
  char mode2[8];
  REQUIRE(causim_intervene_query(gp, sc.p, 6, 22, &iopt, nullptr, mode2, sizeof mode2,
                                 &used) == CAUSIM_OK);
  CHECK(std::strlen(mode2) == 3);
  CHECK(used >= 1);
  CHECK(used <= 6);

  causim_graph_policy_destroy(again);
  causim_graph_policy_destroy(gp);
}

TEST_CASE("dependence table lands on disk") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("confounded", 13, &sc.p) == CAUSIM_OK);
  DemosHandle demos;
  REQUIRE(causim_demos_collect(sc.p, 600, 14, &demos.p) == CAUSIM_OK);
  const std::string path = temp_path("capi_mi.csv");
  REQUIRE(causim_mi_report(demos.p, 400, 5, path.c_str()) == CAUSIM_OK);
  CHECK(fs::exists(path));
  CHECK(causim_mi_report(demos.p, 10000000, 5, path.c_str()) == CAUSIM_INVALID_ARGUMENT);
}

TEST_CASE("variational discovery returns marginals in range") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("confounded", 17, &sc.p) == CAUSIM_OK);
  DemosHandle demos;
  REQUIRE(causim_demos_collect(sc.p, 600, 18, &demos.p) == CAUSIM_OK);

  causim_variational_options opt{};
  opt.steps = 60;
  opt.seed = 19;
  double q[3] = {-1, -1, -1};
  REQUIRE(causim_discover_variational(demos.p, &opt, nullptr, q, 3) == CAUSIM_OK);
  for (double v : q) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  double small[1];
  CHECK(causim_discover_variational(demos.p, &opt, nullptr, small, 1) ==
        CAUSIM_INVALID_ARGUMENT);
}

TEST_CASE("interactive baseline emits its curve") {
  ScenarioHandle sc;
  REQUIRE(causim_scenario_create("confounded", 23, &sc.p) == CAUSIM_OK);
  const causim_train_options opt = quick_train();
  const std::string path = temp_path("capi_dagger.csv");
  double final_return = 0.0;
  REQUIRE(causim_dagger_run(sc.p, 1, 1, 500, 2, &opt, 24, path.c_str(), &final_return) ==
          CAUSIM_OK);
  CHECK(fs::exists(path));
  CHECK(final_return <= -80.0);
}

TEST_CASE("experiment runner separates config errors from io errors") {
  const std::string bad = temp_path("capi_bad_config.txt");
  {
    std::ofstream out(bad);
    out << "experiment.kind = proposition_suite\n"
        << "experiment.seeds = 1 1\n";
  }
  CHECK(causim_run_experiment(bad.c_str()) == CAUSIM_CONFIG_ERROR);
  CHECK(std::string(causim_last_error()).find("experiment.seeds") != std::string::npos);
  CHECK(std::string(causim_last_error()).find("experiment.output_dir") != std::string::npos);

  CHECK(causim_run_experiment(temp_path("capi_no_config.txt").c_str()) == CAUSIM_IO_ERROR);

  const std::string dir = temp_path("capi_prop_run");
  fs::remove_all(dir);
  const std::string good = temp_path("capi_good_config.txt");
  {
    std::ofstream out(good);
    out << "experiment.kind = proposition_suite\n"
        << "experiment.output_dir = " << dir << "\n"
        << "experiment.seeds = 5\n"
        << "proposition.trials = 3\n";
  }
  REQUIRE(causim_run_experiment(good.c_str()) == CAUSIM_OK);
  CHECK(fs::exists(dir + "/result.csv"));

  const char* dirs[1] = {dir.c_str()};
  const std::string report = temp_path("capi_report.txt");
  REQUIRE(causim_report(dirs, 1, report.c_str()) == CAUSIM_OK);
  CHECK(fs::exists(report));
  CHECK(causim_report(nullptr, 0, report.c_str()) == CAUSIM_OK);
}
