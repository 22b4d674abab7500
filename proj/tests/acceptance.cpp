// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rotkit/commands.hpp"

using namespace rotkit;

namespace {

const std::string kData = ROTKIT_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0 when the criterion has no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::vector<std::string> kMsneGames{"3", "5", "6", "7"};

RotationTable msne_table() {
  return io::load_table(kData + "/reference_accumulated_rotation.csv").select_games(kMsneGames);
}

GamePrediction prediction_for(const std::string& id) {
  for (const auto& g : io::load_games(kData + "/companion_games.json")) {
    if (g.id == id) return predict(g.payoff);
  }
  throw std::runtime_error("no game " + id);
}

Schedule single_game(const std::string& id, int rounds) {
  for (const auto& g : io::load_games(kData + "/companion_games.json")) {
    if (g.id == id) return Schedule{{{id, g.payoff, rounds}}};
  }
  throw std::runtime_error("no game " + id);
}

Outcome prediction_table() {
  auto rows = cmd::predict_games(io::load_games(kData + "/companion_games.json"));
  auto expected = read_csv(kData + "/reference_predictions.csv");
  if (rows.size() != expected.size()) return {false, "row count differs"};
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& want = expected[i];
    const auto& got = rows[i].prediction;
    const auto& g = got.game;
    if (rows[i].game_id != want[0]) return {false, "game order differs at " + want[0]};
    if (g.a != parse_rational(want[1]) || g.b != parse_rational(want[2]) ||
        g.c != parse_rational(want[3]) || g.d != parse_rational(want[4])) {
      return {false, "game " + want[0] + ": normalized elements differ"};
    }
    if (want[5] == "--") {
      if (got.direction != 0) return {false, "game " + want[0] + ": expected no rotation"};
    } else {
      double err = std::fabs(got.lambda - std::stod(want[5]));
      worst = std::max(worst, err);
      if (err > 0.0005) return {false, "game " + want[0] + ": lambda " + fmt("%.4f", got.lambda)};
    }
    if (!got.nash || got.nash->p != parse_rational(want[6]) || got.nash->q != parse_rational(want[7])) {
      return {false, "game " + want[0] + ": Nash point differs"};
    }
  }
  return {true, "7 rows exact, max |lambda error| " + fmt("%.5f", worst) + " <= 0.0005"};
}

Outcome rrc_reproduction() {
  auto rrc = response_coefficients(relative_rotation(msne_table()));
  auto expected = read_csv(kData + "/reference_rrc.csv");
  if (rrc.size() != expected.size()) return {false, "group count differs"};
  double worst = 0.0, mean = 0.0;
  for (std::size_t j = 0; j < rrc.size(); ++j) {
    worst = std::max(worst, std::fabs(rrc[j] - std::stod(expected[j][1])));
    mean += rrc[j] / static_cast<double>(rrc.size());
  }
  bool pass = worst <= 0.01 && std::fabs(mean - 1.0) <= 0.005;
  return {pass, "max deviation " + fmt("%.4f", worst) + " (<= 0.01), mean " + fmt("%.4f", mean) +
                    " (1 +/- 0.005)"};
}

Outcome kruskal_wallis_reproduction() {
  auto phi = relative_rotation(msne_table());
  stats::SampleGroups groups(phi.groups.size());
  for (const auto& row : phi.values) {
    for (std::size_t j = 0; j < row.size(); ++j) groups[j].push_back(row[j]);
  }
  auto kw = stats::kruskal_wallis(groups);
  bool pass = std::fabs(kw.h - 21.33) <= 0.2 && kw.df == 12 && kw.p < 0.05;
  return {pass, "H = " + fmt("%.3f", kw.h) + " (21.33 +/- 0.2), df = " + std::to_string(kw.df) +
                    ", p = " + fmt("%.4f", kw.p) + " (< 0.05)"};
}

Outcome direction_consistency() {
  auto table = msne_table();
  int hits = 0, n = 0;
  for (std::size_t i = 0; i < table.games.size(); ++i) {
    int dir = prediction_for(table.games[i]).direction;
    for (double v : table.values[i]) {
      ++n;
      hits += (v > 0 ? 1 : (v < 0 ? -1 : 0)) == dir;
    }
  }
  double p = stats::sign_test(hits, n);
  bool pass = n == 52 && hits == 52 && p < 1e-15;
  return {pass, std::to_string(hits) + "/" + std::to_string(n) + " signs match, binomial p = " +
                    fmt("%.3g", p) + " (< 1e-15)"};
}

Outcome strength_separation() {
  auto table = msne_table();
  std::vector<double> strong, weak;
  for (std::size_t i = 0; i < table.games.size(); ++i) {
    bool is_strong = table.games[i] == "6" || table.games[i] == "7";
    for (double v : table.values[i]) (is_strong ? strong : weak).push_back(std::fabs(v));
  }
  auto t = stats::welch_t(strong, weak);
  return {t.p < 0.01 && t.t > 0, "t = " + fmt("%.3f", t.t) + ", df = " + fmt("%.2f", t.df) +
                                     ", p = " + fmt("%.3g", t.p) + " (< 0.01)"};
}

Outcome ode_properties() {
  double worst = 0.0;
  for (const char* id : {"2", "3", "5", "6", "7"}) {
    auto pred = prediction_for(id);
    auto path = integrate_ode(pred.game, {0.5, 0.5}, 0.01, 10000);
    worst = std::max(worst, std::fabs(path.h_drift()));
    int sign = mean_rotation(path) > 0 ? 1 : (mean_rotation(path) < 0 ? -1 : 0);
    if (sign != pred.direction) return {false, std::string("game ") + id + ": rotation sign differs"};
  }
  return {worst < 1e-6, "5 games, max |dH| = " + fmt("%.2e", worst) + " (< 1e-6), signs match"};
}

Outcome shoelace_oracle() {
  std::mt19937_64 rng(825);
  std::uniform_int_distribution<int> coord(0, 6), len(2, 49);
  for (int trial = 0; trial < 200; ++trial) {
    Trajectory walk;
    int k = len(rng);
    for (int i = 0; i < k; ++i) walk.states.emplace_back(coord(rng), coord(rng), 6);
    walk.states.push_back(walk.states.front());  // closed, at most 50 states

    // Trapezoid form of the signed area in integer counts.
    std::int64_t twice_area = 0;
    for (std::size_t i = 0; i + 1 < walk.states.size(); ++i) {
      const auto& a = walk.states[i];
      const auto& b = walk.states[i + 1];
      twice_area -= static_cast<std::int64_t>(b.p_count() - a.p_count()) * (b.q_count() + a.q_count());
    }
    Rational area(twice_area, 2 * 36);
    if (accumulated_rotation(walk) != 2 * area) {
      return {false, "walk " + std::to_string(trial) + ": " + to_string(accumulated_rotation(walk)) +
                         " != 2 x " + to_string(area)};
    }
  }
  return {true, "200 closed walks, L^a = 2 x shoelace area exactly"};
}

Outcome lambda_ordering() {
  constexpr int kSeeds = 20;
  constexpr int kRounds = 100000;
  std::vector<double> lambdas, magnitudes;
  std::string detail;
  bool signs_ok = true;
  for (const auto& id : kMsneGames) {
    auto pred = prediction_for(id);
    auto schedule = single_game(id, kRounds);
    double sum = 0.0;
    int agree = 0;
    for (int s = 1; s <= kSeeds; ++s) {
      SimConfig cfg;
      cfg.seed = cmd::group_seed(20260101, s);
      double m = to_double(mean_rotation(simulate_agents(schedule, cfg)[0]));
      sum += m;
      agree += (m > 0 ? 1 : -1) == pred.direction;
    }
    double mean = sum / kSeeds;
    signs_ok = signs_ok && (mean > 0 ? 1 : -1) == pred.direction && agree == kSeeds;
    lambdas.push_back(pred.lambda);
    magnitudes.push_back(std::fabs(mean));
    detail += "g" + id + " " + fmt("%+.5f", mean) + " ";
  }
  double rho = stats::spearman_rank(lambdas, magnitudes);
  return {rho == 1.0 && signs_ok, "mean L: " + detail + "rho = " + fmt("%.2f", rho) +
                                      (signs_ok ? ", all seed signs match" : ", sign mismatch")};
}

Outcome minimax_null() {
  constexpr int kTrajectories = 10000;
  constexpr int kRounds = 100;
  auto schedule = single_game("7", kRounds);

  SimConfig uniform;
  uniform.tremble = 1.0;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 1; i <= kTrajectories; ++i) {
    uniform.seed = cmd::group_seed(9, i);
    double m = to_double(mean_rotation(simulate_agents(schedule, uniform)[0]));
    sum += m;
    sum2 += m * m;
  }
  double mean = sum / kTrajectories;
  double se = std::sqrt((sum2 / kTrajectories - mean * mean) / (kTrajectories - 1));
  bool null_ok = std::fabs(mean) < 3 * se;

  SimConfig adaptive;
  int hits = 0, n = 0;
  for (int i = 1; i <= kTrajectories; ++i) {
    adaptive.seed = cmd::group_seed(10, i);
    auto m = mean_rotation(simulate_agents(schedule, adaptive)[0]);
    if (m == Rational(0)) continue;
    ++n;
    hits += m < 0;  // game 7 is predicted clockwise
  }
  double p = stats::sign_test(hits, n);
  bool reject_ok = p < 1e-3 && hits * 2 > n;
  return {null_ok && reject_ok, "uniform: mean " + fmt("%.2e", mean) + ", 3 SE " + fmt("%.2e", 3 * se) +
                                    "; adaptive game 7: " + std::to_string(hits) + "/" +
                                    std::to_string(n) + " clockwise, p = " + fmt("%.2g", p) +
                                    " (< 1e-3)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "prediction table", 1.0, prediction_table},
      {2, "response coefficients", 1.0, rrc_reproduction},
      {3, "Kruskal-Wallis on relative rotation", 1.0, kruskal_wallis_reproduction},
      {4, "direction consistency", 0.0, direction_consistency},
      {5, "strength separation", 0.0, strength_separation},
      {6, "ODE properties", 10.0, ode_properties},
      {7, "shoelace oracle", 0.0, shoelace_oracle},
      {8, "simulated lambda ordering", 120.0, lambda_ordering},
      {9, "minimax null", 0.0, minimax_null},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && elapsed >= c.budget_s) {
      out.pass = false;
      out.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
    }
    failures += !out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << out.detail
              << " [" << fmt("%.3f", elapsed) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
