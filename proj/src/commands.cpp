#include "rotkit/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace rotkit::cmd {

namespace {

std::string nash_text(const std::optional<RationalPoint>& nash) {
  if (!nash) return "--";
  return "(" + to_string(nash->p) + ", " + to_string(nash->q) + ")";
}

std::string direction_text(int d) { return d > 0 ? "+1" : (d < 0 ? "-1" : "0"); }

std::string safe_name(const std::string& id) {
  std::string out = id;
  for (char& ch : out) {
    bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  return out;
}

std::size_t index_of(std::vector<std::string>& ids, const std::string& id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it != ids.end()) return static_cast<std::size_t>(it - ids.begin());
  ids.push_back(id);
  return ids.size() - 1;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<PredictionRow> predict_games(const std::vector<io::GameSpec>& games) {
  std::vector<PredictionRow> rows;
  rows.reserve(games.size());
  for (const auto& g : games) rows.push_back({g.id, predict(g.payoff)});
  return rows;
}

void print_predictions(std::ostream& out, const std::vector<PredictionRow>& rows) {
  std::vector<std::array<std::string, 9>> cells;
  cells.push_back({"game", "class", "a", "b", "c", "d", "lambda", "nash", "direction"});
  for (const auto& r : rows) {
    const auto& p = r.prediction;
    std::ostringstream lambda;
    if (p.direction == 0) {
      lambda << "--";
    } else {
      lambda << std::fixed << std::setprecision(3) << p.lambda;
    }
    cells.push_back({r.game_id, to_string(p.cls), to_string(p.game.a), to_string(p.game.b),
                     to_string(p.game.c), to_string(p.game.d), lambda.str(), nash_text(p.nash),
                     direction_text(p.direction)});
  }
  std::array<std::size_t, 9> width{};
  for (const auto& row : cells) {
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  for (const auto& row : cells) {
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      out << std::left << std::setw(static_cast<int>(width[k])) << row[k] << "  ";
    }
    out << row.back() << "\n";
  }
}

Analysis analyze(const std::vector<Trajectory>& trajectories,
                 const std::vector<io::GameSpec>* games) {
  if (trajectories.empty()) throw std::invalid_argument("no trajectories to analyze");

  std::map<std::string, GamePrediction> predictions;
  std::set<std::string> practice;
  if (games) {
    for (const auto& g : *games) {
      predictions.emplace(g.id, predict(g.payoff));
      if (g.practice) practice.insert(g.id);
    }
  }

  Analysis out;
  auto& table = out.accumulated;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  for (const auto& traj : trajectories) {
    std::optional<RationalPoint> nash;
    if (auto it = predictions.find(traj.game_id); it != predictions.end()) nash = it->second.nash;
    out.reports.push_back(make_report(traj, nash));
    auto gi = index_of(table.games, traj.game_id);
    auto ci = index_of(table.groups, traj.group_id);
    if (!cells.emplace(std::pair{gi, ci}, to_double(out.reports.back().l_accumulated)).second) {
      throw std::invalid_argument("two trajectories for game '" + traj.game_id + "', group '" +
                                  traj.group_id + "'");
    }
  }
  table.values.assign(table.games.size(), std::vector<double>(table.groups.size(), 0.0));
  for (std::size_t g = 0; g < table.games.size(); ++g) {
    for (std::size_t c = 0; c < table.groups.size(); ++c) {
      auto it = cells.find({g, c});
      if (it == cells.end()) {
        throw std::invalid_argument("no trajectory for game '" + table.games[g] + "', group '" +
                                    table.groups[c] + "'");
      }
      table.values[g][c] = it->second;
    }
  }

  for (const auto& id : table.games) {
    if (!games) {
      out.phi_games.push_back(id);
    } else if (auto it = predictions.find(id);
               it != predictions.end() && it->second.direction != 0 && !practice.count(id)) {
      out.phi_games.push_back(id);
    }
  }
  if (!out.phi_games.empty()) {
    try {
      out.phi = relative_rotation(table.select_games(out.phi_games));
      out.rrc = response_coefficients(*out.phi);
    } catch (const DegenerateRowMean&) {
      out.phi.reset();
    }
  }
  return out;
}

void write_analysis(const Analysis& analysis, const std::vector<Trajectory>& trajectories,
                    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "reports");
  for (const auto& r : analysis.reports) {
    auto out = open_out(out_dir / "reports" /
                        ("group_" + safe_name(r.group_id) + "_game_" + safe_name(r.game_id) + ".txt"));
    io::write_report(out, r);
  }
  {
    auto out = open_out(out_dir / "la_table.csv");
    io::write_table(out, analysis.accumulated);
  }
  if (analysis.phi) {
    auto out = open_out(out_dir / "phi_table.csv");
    io::write_table(out, *analysis.phi);
    auto rrc = open_out(out_dir / "rrc.csv");
    rrc << "group,rrc\n" << std::setprecision(17);
    for (std::size_t j = 0; j < analysis.rrc.size(); ++j) {
      rrc << analysis.phi->groups[j] << "," << analysis.rrc[j] << "\n";
    }
  }

  // Accumulated-rotation curves, restarting at each game segment.
  std::map<std::string, std::vector<const Trajectory*>> by_group;
  std::vector<std::string> group_order;
  for (const auto& t : trajectories) {
    if (!by_group.count(t.group_id)) group_order.push_back(t.group_id);
    by_group[t.group_id].push_back(&t);
  }
  for (const auto& group : group_order) {
    auto out = open_out(out_dir / ("cumulative_" + safe_name(group) + ".csv"));
    out << "round,game,l_accumulated\n" << std::setprecision(17);
    long long round = 0;
    for (const auto* t : by_group[group]) {
      auto curve = cumulative_rotation(*t);
      for (const auto& v : curve) out << ++round << "," << t->game_id << "," << to_double(v) << "\n";
      ++round;
    }
  }
}

std::uint64_t group_seed(std::uint64_t run_seed, int index) {
  // splitmix64 finalizer over (seed, index).
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

io::RunManifest simulate(const Schedule& schedule, const SimConfig& config,
                         const SimulateOptions& options) {
  schedule.validate();
  config.validate();
  if (options.groups < 1) throw std::invalid_argument("need at least one group");
  std::filesystem::create_directories(options.out_dir);

  std::vector<std::vector<std::string>> produced(static_cast<std::size_t>(options.groups));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int g = next++; g < options.groups; g = next++) {
      try {
        SimConfig cfg = config;
        cfg.seed = group_seed(config.seed, g + 1);
        auto group_id = std::to_string(g + 1);
        auto segments = simulate_agents(schedule, cfg, group_id);
        for (const auto& traj : segments) {
          std::string name = "group_" + group_id + "_game_" + safe_name(traj.game_id) + ".csv";
          io::save_trajectory(options.out_dir / name, traj);
          produced[static_cast<std::size_t>(g)].push_back(name);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned n_workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  n_workers = std::clamp(n_workers, 1u, static_cast<unsigned>(options.groups));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  io::RunManifest manifest;
  manifest.schedule_path = options.schedule_path;
  manifest.config = config;
  manifest.groups = options.groups;
  manifest.output_dir = options.out_dir.string();
  for (const auto& names : produced) {
    for (const auto& name : names) {
      manifest.files.push_back({name, io::sha256_file(options.out_dir / name)});
    }
  }
  io::save_manifest(options.out_dir / "manifest.json", manifest);
  return manifest;
}

std::vector<stats::TestResult> run_stats(const RotationTable& accumulated,
                                         const std::vector<io::GameSpec>& games) {
  std::map<std::string, GamePrediction> predictions;
  for (const auto& g : games) {
    if (!g.practice) predictions.emplace(g.id, predict(g.payoff));
  }

  std::vector<stats::TestResult> results;
  std::vector<std::string> rotating;
  int pooled_hits = 0, pooled_n = 0;

  for (std::size_t i = 0; i < accumulated.games.size(); ++i) {
    const auto& id = accumulated.games[i];
    auto it = predictions.find(id);
    if (it == predictions.end()) continue;
    const auto& row = accumulated.values[i];
    int dir = it->second.direction;
    if (dir == 0) {
      if (row.size() >= 2) {
        auto t = stats::one_sample_t(row, 0.0);
        results.push_back({"t_zero_game_" + id, t.t, t.df, t.p});
      }
      continue;
    }
    rotating.push_back(id);
    int hits = static_cast<int>(std::count_if(row.begin(), row.end(), [&](double v) {
      return (v > 0 ? 1 : (v < 0 ? -1 : 0)) == dir;
    }));
    int n = static_cast<int>(row.size());
    pooled_hits += hits;
    pooled_n += n;
    results.push_back({"sign_game_" + id, static_cast<double>(hits), static_cast<double>(n),
                       stats::sign_test(hits, n)});
  }
  if (pooled_n > 0) {
    results.push_back({"sign_pooled", static_cast<double>(pooled_hits),
                       static_cast<double>(pooled_n), stats::sign_test(pooled_hits, pooled_n)});
  }
  if (rotating.size() < 2) return results;

  auto rows = accumulated.select_games(rotating);
  std::vector<std::size_t> by_lambda(rotating.size());
  std::iota(by_lambda.begin(), by_lambda.end(), 0);
  std::stable_sort(by_lambda.begin(), by_lambda.end(), [&](std::size_t x, std::size_t y) {
    return predictions[rotating[x]].lambda < predictions[rotating[y]].lambda;
  });
  const std::size_t half = rotating.size() / 2;
  std::vector<double> weak, strong;
  std::string weak_name, strong_name;
  for (std::size_t k = 0; k < half; ++k) {
    std::size_t lo = by_lambda[k], hi = by_lambda[rotating.size() - 1 - k];
    for (double v : rows.values[lo]) weak.push_back(std::fabs(v));
    for (double v : rows.values[hi]) strong.push_back(std::fabs(v));
    weak_name += (k ? "+" : "") + rotating[lo];
    strong_name = rotating[hi] + (k ? "+" : "") + strong_name;
  }
  if (weak.size() >= 2 && strong.size() >= 2) {
    auto t = stats::welch_t(strong, weak);
    results.push_back({"welch_abs_" + strong_name + "_vs_" + weak_name, t.t, t.df, t.p});
  }

  std::vector<double> lambdas, magnitudes;
  for (std::size_t k = 0; k < rotating.size(); ++k) {
    lambdas.push_back(predictions[rotating[k]].lambda);
    magnitudes.push_back(std::fabs(rows.row_mean(k)));
  }
  results.push_back({"spearman_lambda_vs_abs_mean", stats::spearman_rank(lambdas, magnitudes),
                     static_cast<double>(lambdas.size()), std::nan("")});

  try {
    auto phi = relative_rotation(rows);
    stats::SampleGroups groups(phi.groups.size());
    for (const auto& row : phi.values) {
      for (std::size_t j = 0; j < row.size(); ++j) groups[j].push_back(row[j]);
    }
    if (groups.size() >= 2) {
      auto kw = stats::kruskal_wallis(groups);
      results.push_back({"kruskal_wallis_phi", kw.h, static_cast<double>(kw.df), kw.p});
    }
    if (phi.games.size() >= 2) {
      for (std::size_t j = 0; j < groups.size(); ++j) {
        auto t = stats::one_sample_t(groups[j], 1.0);
        results.push_back({"one_sample_t_phi_group_" + phi.groups[j], t.t, t.df, t.p});
      }
    }
  } catch (const DegenerateRowMean&) {
    // phi undefined; the rank tests are skipped.
  }
  return results;
}

void write_phase(std::ostream& out, const std::vector<io::GameSpec>& games, int grid_n) {
  out << "game,p,q,dp,dq\n" << std::setprecision(17);
  for (const auto& g : games) {
    auto norm = normalize(reduce_to_antidiagonal(g.payoff));
    for (const auto& s : phase_field_sample(norm, grid_n)) {
      out << g.id << "," << s.p << "," << s.q << "," << s.v.dp << "," << s.v.dq << "\n";
    }
  }
}

}  // namespace rotkit::cmd
