#pragma once

// Readers and writers for the CSV and JSON files rotkit consumes and produces.
// Byte-level examples live in docs/formats.md.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotkit/dynamics.hpp"
#include "rotkit/game.hpp"
#include "rotkit/rotation.hpp"
#include "rotkit/stats.hpp"

namespace rotkit::io {

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

class LatticeViolation : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class NonContiguousRounds : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Trajectory CSV.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in, const std::string& source = "<stream>");
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);

struct GameSpec {
  std::string id;
  PayoffMatrix payoff;
  bool practice = false;  // warm-up game, left out of relative rotation and inference
};

// {"games": [{"id": "3", "payoff": ["0", "5/6", "1/6", "0"], "practice": false}, ...]}
std::vector<GameSpec> parse_games(const std::string& text, const std::string& source = "<string>");
std::vector<GameSpec> load_games(const std::filesystem::path& path);

// {"entries": [{"game": "3", "rounds": 100, "payoff": [...]}, ...]}
Schedule parse_schedule(const std::string& text, const std::string& source = "<string>");
Schedule load_schedule(const std::filesystem::path& path);

SimConfig parse_config(const std::string& text, const std::string& source = "<string>");
SimConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const SimConfig& config);

// CSV with header "game,<group>,<group>,..." and one row per game.
RotationTable read_table(std::istream& in, const std::string& source = "<stream>");
RotationTable load_table(const std::filesystem::path& path);
void write_table(std::ostream& out, const RotationTable& table);

void write_report(std::ostream& out, const RotationReport& report);
void write_results(std::ostream& out, const std::vector<stats::TestResult>& results);

std::string sha256_file(const std::filesystem::path& path);

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct RunManifest {
  std::string schedule_path;
  SimConfig config;
  int groups = 0;
  std::string output_dir;
  std::vector<ManifestFile> files;
};

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);
/// Names of listed files that are missing or whose checksum differs.
std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::filesystem::path& base);

std::string read_text(const std::filesystem::path& path);

}  // namespace rotkit::io
