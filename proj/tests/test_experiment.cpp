#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "caplab/experiment.hpp"

using namespace caplab;
using doctest::Approx;

namespace {

ordered_json base_doc() {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["seed"] = 7;
  doc["mode"] = "FINAL";
  doc["space"] = {{"n_features", 2}, {"n_labels", 2}};
  doc["hypothesis_space"] = {{"kind", "lookup_tables_with_mixed"}};
  doc["dataset_dist"] = {{"kind", "iid_uniform"}, {"n", 2}};
  doc["learner"] = {{"name", "memorizer"}};
  doc["analyses"] = ordered_json::object();
  return doc;
}

std::string report_without_timestamp(const ordered_json& report) {
  ordered_json copy = report;
  copy.erase("timestamp");
  return copy.dump(2);
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("strict config validation rejects malformed documents") {
  const auto rejects = [](ordered_json doc) {
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
  };

  {  // unknown top-level key
    ordered_json d = base_doc();
    d["extra"] = 1;
    rejects(d);
  }
  {  // unsupported schema version
    ordered_json d = base_doc();
    d["schema_version"] = 2;
    rejects(d);
  }
  {  // missing seed
    ordered_json d = base_doc();
    d.erase("seed");
    rejects(d);
  }
  {  // bad mode enum
    ordered_json d = base_doc();
    d["mode"] = "last";
    rejects(d);
  }
  {  // degenerate space
    ordered_json d = base_doc();
    d["space"]["n_features"] = 0;
    rejects(d);
  }
  {  // thresholds need binary labels
    ordered_json d = base_doc();
    d["space"]["n_labels"] = 3;
    d["hypothesis_space"]["kind"] = "thresholds";
    rejects(d);
  }
  {  // unknown distribution kind
    ordered_json d = base_doc();
    d["dataset_dist"] = {{"kind", "iid_unform"}, {"n", 2}};
    rejects(d);
  }
  {  // explicit support without probabilities
    ordered_json d = base_doc();
    d["dataset_dist"] = {{"kind", "explicit"},
                         {"datasets", ordered_json::array({ordered_json::array(
                             {ordered_json::array({0, 0})})})}};
    rejects(d);
  }
  {  // out-of-range example
    ordered_json d = base_doc();
    d["dataset_dist"] = {{"kind", "empirical"},
                         {"datasets", ordered_json::array({ordered_json::array(
                             {ordered_json::array({0, 5})})})}};
    rejects(d);
  }
  {  // unknown learner
    ordered_json d = base_doc();
    d["learner"] = {{"name", "sgd"}};
    rejects(d);
  }
  {  // gibbs_erm requires beta
    ordered_json d = base_doc();
    d["learner"] = {{"name", "gibbs_erm"}};
    rejects(d);
  }
  {  // unknown analysis
    ordered_json d = base_doc();
    d["analyses"]["capcity"] = ordered_json::object();
    rejects(d);
  }
  {  // ldm needs k >= 2
    ordered_json d = base_doc();
    d["analyses"]["ldm"] = {{"k", 1}};
    rejects(d);
  }
  {  // ldm schedule must end at k
    ordered_json d = base_doc();
    d["analyses"]["ldm"] = {{"k", 50}, {"schedule", {10, 20}}};
    rejects(d);
  }
  {  // bias requires epsilon
    ordered_json d = base_doc();
    d["analyses"]["bias"] = ordered_json::object();
    rejects(d);
  }
  {  // beta_sweep only applies to gibbs_erm
    ordered_json d = base_doc();
    d["analyses"]["beta_sweep"] = {{"betas", {0.0, 1.0}}};
    rejects(d);
  }
  {  // diagnostics slack must be non-negative
    ordered_json d = base_doc();
    d["analyses"]["diagnostics"] = {{"slack", -0.5}};
    rejects(d);
  }
}

TEST_CASE("resolved config materializes defaults") {
  ordered_json d = base_doc();
  d.erase("mode");
  d["analyses"]["sup_capacity"] = ordered_json::object();
  d["analyses"]["ldm"] = {{"k", 10}};
  d["analyses"]["complexity"] = ordered_json::object();
  const ExperimentConfig cfg = parse_config(d);
  CHECK(cfg.mode == Mode::Averaged);  // default mode
  const ordered_json& an = cfg.resolved.at("analyses");
  CHECK(an.at("sup_capacity").at("domain") == "support");
  CHECK(an.at("sup_capacity").at("tol").get<double>() == Approx(1e-9));
  CHECK(an.at("sup_capacity").at("max_iter").get<int>() == 100000);
  CHECK(an.at("ldm").at("bootstrap").get<int>() == 1000);
  CHECK(an.at("ldm").at("level").get<double>() == Approx(0.95));
  CHECK(an.at("complexity").at("mc_samples").get<int>() == 10000);
}

TEST_CASE("bits_json uses the infinity sentinels") {
  CHECK(bits_json(1.5).get<double>() == Approx(1.5));
  CHECK(bits_json(std::numeric_limits<double>::infinity()) ==
        ordered_json("INFINITE"));
  CHECK(bits_json(-std::numeric_limits<double>::infinity()) ==
        ordered_json("NEGATIVE_INFINITE"));
}

TEST_CASE("run_experiment computes the memorizer anchor end to end") {
  ordered_json d = base_doc();
  d["analyses"]["capacity"] = ordered_json::object();
  d["analyses"]["sup_capacity"] = ordered_json::object();
  d["analyses"]["expressivity"] = ordered_json::object();
  d["analyses"]["bias"] = {{"epsilon", 0.3}};
  d["analyses"]["bounds"] = ordered_json::object();
  d["analyses"]["complexity"] = ordered_json::object();
  d["analyses"]["diagnostics"] = {
      {"train", ordered_json::array({ordered_json::array({0, 1}),
                                     ordered_json::array({1, 0})})}};
  const ExperimentConfig cfg = parse_config(d);
  const RunResultBundle bundle = run_experiment(cfg, 2);
  const ordered_json& res = bundle.report.at("results");

  // Deterministic final-hypothesis memorizer over 16 uniform datasets:
  // 8 equally likely outputs, zero row entropy -> exactly 3 bits, and the
  // uniform-over-support distribution is already capacity-achieving.
  CHECK(res.at("capacity").at("bits").get<double>() == Approx(3.0).epsilon(1e-12));
  CHECK(res.at("sup_capacity").at("bits").get<double>() ==
        Approx(3.0).epsilon(1e-9));
  CHECK(res.at("sup_capacity").at("converged").get<bool>());
  CHECK(res.at("expressivity").at("bits").get<double>() ==
        Approx(3.0).epsilon(1e-12));
  CHECK(res.at("expressivity").at("provenance") == "EXACT");

  // E[c_d]: 8 constant-label datasets compress to 3 bits, the rest pay raw 4.
  CHECK(res.at("complexity").at("expected_bits").get<double>() ==
        Approx(3.5).epsilon(1e-12));
  CHECK(res.at("complexity").at("exact").get<bool>());

  CHECK(res.at("bounds").at("all_hold").get<bool>());
  CHECK(res.at("diagnostics").at("capacity_overfit").at("decision") == "NO");
  CHECK(res.at("diagnostics").contains("model_overfit"));
  CHECK(res.at("diagnostics").at("train_dataset_probability").get<double>() ==
        Approx(1.0 / 16).epsilon(1e-12));

  // Report header fields.
  CHECK(bundle.report.at("schema_version").get<int>() == 1);
  CHECK(bundle.report.at("seed").get<std::uint64_t>() == 7);
  CHECK(bundle.report.at("mode") == "FINAL");
  CHECK(bundle.report.at("config").at("learner").at("name") == "memorizer");

  // CSV side outputs.
  bool saw_bounds = false, saw_orientation = false;
  for (const OutputFile& f : bundle.csv_files) {
    if (f.name == "bounds.csv") {
      saw_bounds = true;
      CHECK(f.content.rfind("name,lhs_bits", 0) == 0);
    }
    if (f.name == "orientation.csv") saw_orientation = true;
  }
  CHECK(saw_bounds);
  CHECK(saw_orientation);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  ordered_json d = base_doc();
  d["mode"] = "AVERAGED";
  d["learner"] = {{"name", "iterative_memorizer"}, {"iterations", 2}};
  d["analyses"]["capacity"] = ordered_json::object();
  d["analyses"]["time_indexed"] = ordered_json::object();
  d["analyses"]["ldm"] = {{"k", 40}, {"schedule", {10, 40}}, {"bootstrap", 200}};
  d["analyses"]["expressivity"] = ordered_json::object();
  d["analyses"]["complexity"] = {{"mc_samples", 500}};
  const ExperimentConfig cfg = parse_config(d);

  const RunResultBundle serial = run_experiment(cfg, 1);
  const RunResultBundle parallel = run_experiment(cfg, 4);
  const RunResultBundle repeat = run_experiment(cfg, 4);

  CHECK(report_without_timestamp(serial.report) ==
        report_without_timestamp(parallel.report));
  CHECK(report_without_timestamp(parallel.report) ==
        report_without_timestamp(repeat.report));
  REQUIRE(serial.csv_files.size() == parallel.csv_files.size());
  for (std::size_t i = 0; i < serial.csv_files.size(); ++i) {
    CHECK(serial.csv_files[i].name == parallel.csv_files[i].name);
    CHECK(serial.csv_files[i].content == parallel.csv_files[i].content);
  }

  // A different seed changes the sampled analyses.
  ExperimentConfig reseeded = cfg;
  reseeded.seed = 8;
  const RunResultBundle other = run_experiment(reseeded, 4);
  CHECK(other.report.at("results").at("ldm").at("capacity_hat_bits") !=
        serial.report.at("results").at("ldm").at("capacity_hat_bits"));
}

TEST_CASE("oversized exact analyses raise the capacity-limit error") {
  ordered_json d = base_doc();
  d["dataset_dist"] = {{"kind", "iid_uniform"}, {"n", 11}};  // 4^11 > 2^20
  d["analyses"]["capacity"] = ordered_json::object();
  const ExperimentConfig cfg = parse_config(d);
  CHECK_THROWS_AS(run_experiment(cfg, 1), CapacityLimitError);

  // The LDM estimator still works at that size.
  ordered_json d2 = base_doc();
  d2["dataset_dist"] = {{"kind", "iid_uniform"}, {"n", 11}};
  d2["analyses"]["ldm"] = {{"k", 20}, {"bootstrap", 100}};
  const RunResultBundle bundle = run_experiment(parse_config(d2), 2);
  const double hat = bundle.report.at("results").at("ldm").at("capacity_hat_bits")
                         .get<double>();
  CHECK(hat >= 0.0);
  CHECK(hat <= std::log2(9.0) + 1e-9);
}

TEST_CASE("halting_demo reads a corpus file relative to the corpus root") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "caplab_test_corpus";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "corpus.txt");
    f << "program halts 2\n"
         "JZ 0 3\nDEC 0\nJMP 0\nHALT\n"
         "\n"
         "program spins\n"
         "JMP 0\n";
  }
  ordered_json d = base_doc();
  d["analyses"]["halting_demo"] = {
      {"corpus", "corpus.txt"},
      {"budgets", {1, 10, 100, 1000}},
      {"train", ordered_json::array({ordered_json::array({0, 1}),
                                     ordered_json::array({1, 0})})}};
  const ExperimentConfig cfg = parse_config(d);
  const RunResultBundle bundle = run_experiment(cfg, 1, dir.string());
  const ordered_json& r = bundle.report.at("results").at("halting_demo");
  CHECK(r.at("programs").get<int>() == 2);
  CHECK(r.at("cases").get<int>() == 8);
  CHECK(r.at("agreement_rate").get<double>() == Approx(1.0));
  bool saw_csv = false;
  for (const OutputFile& f : bundle.csv_files)
    if (f.name == "halting.csv") saw_csv = true;
  CHECK(saw_csv);
  fs::remove_all(dir);
}

TEST_CASE("beta_sweep spans the gibbs family") {
  ordered_json d = base_doc();
  d["learner"] = {{"name", "gibbs_erm"}, {"beta", 1.0}};
  d["dataset_dist"] = {{"kind", "iid_uniform"}, {"n", 2}};
  d["analyses"]["beta_sweep"] = {{"betas", {0.0, 1.0, 8.0}}, {"epsilon", 0.3}};
  const RunResultBundle bundle = run_experiment(parse_config(d), 2);
  const ordered_json& rows = bundle.report.at("results").at("beta_sweep").at("rows");
  REQUIRE(rows.size() == 3);
  // beta = 0 is the uniform guesser: zero capacity, maximal expressivity.
  CHECK(rows[0].at("capacity_bits").get<double>() ==
        Approx(0.0).scale(1.0).epsilon(1e-12));
  // Capacity grows with beta as the posterior sharpens.
  CHECK(rows[2].at("capacity_bits").get<double>() >
        rows[1].at("capacity_bits").get<double>());
  CHECK(rows[1].at("capacity_bits").get<double>() > 0.0);
}

}  // TEST_SUITE
