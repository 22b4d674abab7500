// rotkit command line entry point.
//
// Exit codes: 0 success, 2 validation error (bad input or arguments),
// 1 internal error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rotkit/commands.hpp"
#include "rotkit/io.hpp"

namespace fs = std::filesystem;
using namespace rotkit;

namespace {

constexpr int kValidationError = 2;
constexpr int kInternalError = 1;

int run_predict(const std::string& games_path) {
  auto rows = cmd::predict_games(io::load_games(games_path));
  cmd::print_predictions(std::cout, rows);
  return 0;
}

int run_analyze(const std::vector<std::string>& files, const std::string& games_path,
                const std::string& out_dir) {
  std::vector<Trajectory> trajectories;
  for (const auto& f : files) trajectories.push_back(io::load_trajectory(f));
  std::optional<std::vector<io::GameSpec>> games;
  if (!games_path.empty()) games = io::load_games(games_path);

  auto analysis = cmd::analyze(trajectories, games ? &*games : nullptr);
  io::write_table(std::cout, analysis.accumulated);
  if (analysis.phi) {
    std::cout << "\nrrc";
    for (double v : analysis.rrc) std::cout << "," << v;
    std::cout << "\n";
  } else {
    std::cout << "\nrelative rotation undefined (a selected game has zero mean rotation)\n";
  }
  if (!out_dir.empty()) cmd::write_analysis(analysis, trajectories, out_dir);
  return 0;
}

int run_simulate(const std::string& schedule_path, const std::string& config_path,
                 std::optional<std::uint64_t> seed, int groups, const std::string& out_dir) {
  auto schedule = io::load_schedule(schedule_path);
  SimConfig config = config_path.empty() ? SimConfig{} : io::load_config(config_path);
  if (seed) config.seed = *seed;
  cmd::SimulateOptions options;
  options.schedule_path = schedule_path;
  options.groups = groups;
  options.out_dir = out_dir;
  auto manifest = cmd::simulate(schedule, config, options);
  std::cout << "wrote " << manifest.files.size() << " trajectory files and manifest.json to "
            << out_dir << "\n";
  return 0;
}

int run_stats(const std::string& table_path, const std::string& games_path,
              const std::string& out_path) {
  auto table = io::load_table(table_path);
  auto games = io::load_games(games_path);
  auto results = cmd::run_stats(table, games);
  io::write_results(std::cout, results);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw io::IoError("cannot write " + out_path);
    io::write_results(out, results);
  }
  return 0;
}

int run_phase(const std::string& games_path, int grid, const std::string& out_path) {
  auto games = io::load_games(games_path);
  if (out_path.empty()) {
    cmd::write_phase(std::cout, games, grid);
  } else {
    std::ofstream out(out_path);
    if (!out) throw io::IoError("cannot write " + out_path);
    cmd::write_phase(out, games, grid);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotkit: rotation observables for two-population 2x2 game dynamics"};
  app.require_subcommand(1);

  std::string games_path, out, schedule_path, config_path, table_path;
  std::vector<std::string> files;
  std::optional<std::uint64_t> seed;
  int groups = 13;
  int grid = 11;

  auto* predict = app.add_subcommand("predict", "normalized game elements, lambda, Nash, direction");
  predict->add_option("--games,games", games_path, "games JSON file")->required()->check(CLI::ExistingFile);

  auto* analyze = app.add_subcommand("analyze", "rotation reports and L^a / phi / R.R.C. tables");
  analyze->add_option("files", files, "trajectory CSV files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--games", games_path, "games JSON (enables CRI, distance, MSNE selection)")
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", out, "output directory");

  auto* simulate = app.add_subcommand("simulate", "agent-based runs of a payoff schedule");
  simulate->add_option("--schedule", schedule_path, "schedule JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--config", config_path, "simulation config JSON")->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "run seed (overrides config)");
  simulate->add_option("--groups", groups, "number of independent groups")->check(CLI::PositiveNumber);
  simulate->add_option("--out", out, "output directory")->required();

  auto* stats = app.add_subcommand("stats", "inference battery over an L^a table");
  stats->add_option("--table,table", table_path, "L^a table CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--games", games_path, "games JSON")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", out, "also write the results CSV here");

  auto* phase = app.add_subcommand("phase", "replicator vector field samples as CSV");
  phase->add_option("--games,games", games_path, "games JSON")->required()->check(CLI::ExistingFile);
  phase->add_option("--grid", grid, "grid points per axis (>= 2)");
  phase->add_option("--out", out, "output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  try {
    if (*predict) return run_predict(games_path);
    if (*analyze) return run_analyze(files, games_path, out);
    if (*simulate) return run_simulate(schedule_path, config_path, seed, groups, out);
    if (*stats) return run_stats(table_path, games_path, out);
    if (*phase) return run_phase(games_path, grid, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}
