// caplab command-line tool.
//
//   caplab run <config.json> [--output-dir DIR] [--threads N] [--seed-override S]
//   caplab validate <config.json>
//
// Exit codes: 0 success, 2 invalid config/input, 3 enumeration cap exceeded
// (rerun with the "ldm" analysis for sampled estimates), 1 internal error.
//
// Worker threads: --threads beats the CAPLAB_THREADS environment variable,
// which beats the hardware concurrency. Thread count never changes results,
// only wall time.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "caplab/experiment.hpp"
#include "caplab/parallel.hpp"

namespace {

unsigned resolve_threads(unsigned cli_threads) {
  if (cli_threads > 0) return caplab::clamp_threads(cli_threads);
  if (const char* env = std::getenv("CAPLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return caplab::clamp_threads(static_cast<unsigned>(v));
    std::cerr << "warning: ignoring malformed CAPLAB_THREADS=\"" << env
              << "\"\n";
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

int run_command(const std::string& config_path, const std::string& output_dir,
                unsigned threads, std::optional<std::uint64_t> seed_override) {
  caplab::ExperimentConfig cfg = caplab::load_config(config_path);
  if (seed_override) {
    cfg.seed = *seed_override;
    cfg.resolved["seed"] = *seed_override;
  }
  const std::string corpus_root =
      std::filesystem::path(config_path).parent_path().string();
  caplab::RunResultBundle bundle =
      caplab::run_experiment(cfg, threads, corpus_root);

  std::filesystem::create_directories(output_dir);
  const std::filesystem::path out(output_dir);
  {
    std::ofstream f(out / "report.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write report.json");
    f << bundle.report.dump(2) << "\n";
  }
  for (const caplab::OutputFile& file : bundle.csv_files) {
    std::ofstream f(out / file.name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + file.name);
    f << file.content;
  }
  std::cout << "wrote " << (out / "report.json").string();
  for (const caplab::OutputFile& file : bundle.csv_files)
    std::cout << ", " << (out / file.name).string();
  std::cout << "\n";
  return caplab::kExitOk;
}

int validate_command(const std::string& config_path) {
  const caplab::ExperimentConfig cfg = caplab::load_config(config_path);
  const auto gspace = caplab::build_hypothesis_space(cfg);
  const caplab::DatasetDistribution dist =
      caplab::build_dataset_distribution(cfg);
  const caplab::LearnerProfile learner = caplab::build_learner(cfg, gspace);
  std::cout << "OK: learner=" << learner.name
            << " |G|=" << gspace->size()
            << " n=" << dist.length();
  if (const auto size = dist.support_size())
    std::cout << " support=" << *size;
  else
    std::cout << " support=overflow";
  std::cout << " analyses=" << cfg.analyses.size() << "\n";
  return caplab::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"caplab: capacity, expressivity and bias analysis of finite "
               "learning algorithms"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir = ".";
  unsigned threads = 0;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;

  CLI::App* run = app.add_subcommand("run", "run the configured analyses");
  run->add_option("config", config_path, "experiment config JSON")->required();
  run->add_option("--output-dir", output_dir,
                  "directory for report.json and CSV outputs");
  run->add_option("--threads", threads,
                  "worker threads (0 = CAPLAB_THREADS or hardware)");
  run->add_option("--seed-override", seed_override,
                  "replace the config's master seed")
      ->each([&](const std::string&) { has_seed_override = true; });

  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running");
  validate->add_option("config", config_path, "experiment config JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? caplab::kExitOk : caplab::kExitValidation;
  }

  try {
    if (run->parsed()) {
      return run_command(config_path, output_dir, resolve_threads(threads),
                         has_seed_override
                             ? std::optional<std::uint64_t>(seed_override)
                             : std::nullopt);
    }
    return validate_command(config_path);
  } catch (const caplab::CapacityLimitError& e) {
    std::cerr << "error: " << e.what()
              << "\nhint: the dataset support is too large for exact "
                 "enumeration; configure the \"ldm\" analysis to use sampled "
                 "estimates instead.\n";
    return caplab::kExitCapacityLimit;
  } catch (const caplab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return caplab::kExitValidation;
  } catch (const caplab::ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return caplab::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return caplab::kExitInternal;
  }
}
