#pragma once

// Library side of the rotkit subcommands, so the CLI stays a thin flag
// parser and the acceptance suite can drive the same code paths.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rotkit/dynamics.hpp"
#include "rotkit/game.hpp"
#include "rotkit/io.hpp"
#include "rotkit/rotation.hpp"
#include "rotkit/stats.hpp"

namespace rotkit::cmd {

struct PredictionRow {
  std::string game_id;
  GamePrediction prediction;
};

std::vector<PredictionRow> predict_games(const std::vector<io::GameSpec>& games);
/// Whitespace-aligned table: game class a b c d lambda nash direction.
void print_predictions(std::ostream& out, const std::vector<PredictionRow>& rows);

struct Analysis {
  std::vector<RotationReport> reports;   // input order
  RotationTable accumulated;             // L^a, games x groups
  std::vector<std::string> phi_games;    // rows entering phi / R.R.C.
  std::optional<RotationTable> phi;      // empty when a row mean vanishes
  std::vector<double> rrc;
};

/// Tables need one trajectory per (game, group) pair. With `games`, phi uses
/// the rotating interior-MSNE games not marked as practice, and the reports
/// carry CRI and distance; without it, every game row enters phi.
Analysis analyze(const std::vector<Trajectory>& trajectories,
                 const std::vector<io::GameSpec>* games = nullptr);

/// Writes reports/, la_table.csv, phi_table.csv, rrc.csv and
/// cumulative_<group>.csv under `out_dir`.
void write_analysis(const Analysis& analysis, const std::vector<Trajectory>& trajectories,
                    const std::filesystem::path& out_dir);

struct SimulateOptions {
  std::string schedule_path;
  int groups = 1;
  std::filesystem::path out_dir;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// Seed for group `index` (1-based) derived from the run seed.
std::uint64_t group_seed(std::uint64_t run_seed, int index);

/// One trajectory file per (group, schedule entry) plus manifest.json,
/// written after every worker finished.
io::RunManifest simulate(const Schedule& schedule, const SimConfig& config,
                         const SimulateOptions& options);

/// The inference battery over an L^a table: per-game and pooled sign tests,
/// a Welch t-test of strong vs. weak games by lambda, Kruskal-Wallis on phi,
/// Spearman lambda vs |row mean|, one-sample t-tests of each group's phi
/// against 1, and t-tests against 0 for non-rotating games. Practice games
/// are left out.
std::vector<stats::TestResult> run_stats(const RotationTable& accumulated,
                                         const std::vector<io::GameSpec>& games);

/// CSV rows game,p,q,dp,dq for each game.
void write_phase(std::ostream& out, const std::vector<io::GameSpec>& games, int grid_n);

}  // namespace rotkit::cmd
