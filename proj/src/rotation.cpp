#include "rotkit/rotation.hpp"

#include <cmath>
#include <numeric>

namespace rotkit {

PopulationState::PopulationState(int p_count, int q_count, int n)
    : p_count_(p_count), q_count_(q_count), n_(n) {
  if (n <= 0) throw std::out_of_range("population size must be positive");
  if (p_count < 0 || p_count > n || q_count < 0 || q_count > n) {
    throw std::out_of_range("state (" + std::to_string(p_count) + ", " +
                            std::to_string(q_count) + ") outside [0, " + std::to_string(n) +
                            "]^2");
  }
}

int Trajectory::population_size() const {
  if (states.empty()) return 0;
  int n = states.front().n();
  for (const auto& s : states) {
    if (s.n() != n) throw MismatchedPopulationSize("trajectory mixes population sizes");
  }
  return n;
}

namespace {

// Integer numerator of the cross product; the value is this over n^2.
std::int64_t cross_counts(const PopulationState& x, const PopulationState& y) {
  return std::int64_t{x.p_count()} * y.q_count() - std::int64_t{x.q_count()} * y.p_count();
}

void require_transitions(const Trajectory& traj) {
  if (traj.rounds() < 2) {
    throw TooShortTrajectory("rotation needs at least two rounds");
  }
  traj.population_size();
}

Rational cross(const RationalPoint& u, const RationalPoint& v) { return u.p * v.q - u.q * v.p; }
Rational dot(const RationalPoint& u, const RationalPoint& v) { return u.p * v.p + u.q * v.q; }
RationalPoint minus(const RationalPoint& u, const RationalPoint& v) {
  return {u.p - v.p, u.q - v.q};
}
RationalPoint point_of(const PopulationState& s) { return {s.p(), s.q()}; }

}  // namespace

Rational instantaneous_rotation(const PopulationState& x, const PopulationState& next) {
  if (x.n() != next.n()) throw MismatchedPopulationSize("states have different population sizes");
  return Rational(cross_counts(x, next), std::int64_t{x.n()} * x.n());
}

Rational instantaneous_rotation_about(const PopulationState& x, const PopulationState& next,
                                      const RationalPoint& center) {
  if (x.n() != next.n()) throw MismatchedPopulationSize("states have different population sizes");
  return cross(minus(point_of(x), center), minus(point_of(next), center));
}

std::vector<Rational> rotation_series(const Trajectory& traj) {
  require_transitions(traj);
  std::vector<Rational> out;
  out.reserve(traj.rounds() - 1);
  for (std::size_t t = 0; t + 1 < traj.rounds(); ++t) {
    out.push_back(instantaneous_rotation(traj.states[t], traj.states[t + 1]));
  }
  return out;
}

std::vector<Rational> cumulative_rotation(const Trajectory& traj) {
  auto series = rotation_series(traj);
  std::partial_sum(series.begin(), series.end(), series.begin());
  return series;
}

Rational accumulated_rotation(const Trajectory& traj) {
  require_transitions(traj);
  std::int64_t sum = 0;
  for (std::size_t t = 0; t + 1 < traj.rounds(); ++t) {
    sum += cross_counts(traj.states[t], traj.states[t + 1]);
  }
  std::int64_t n = traj.population_size();
  return Rational(sum, n * n);
}

Rational mean_rotation(const Trajectory& traj) {
  return accumulated_rotation(traj) / static_cast<std::int64_t>(traj.rounds() - 1);
}

double RotationTable::row_mean(std::size_t game) const {
  const auto& row = values.at(game);
  if (row.empty()) return 0.0;
  return std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
}

RotationTable RotationTable::select_games(const std::vector<std::string>& ids) const {
  RotationTable out;
  out.groups = groups;
  for (const auto& id : ids) {
    std::size_t i = 0;
    while (i < games.size() && games[i] != id) ++i;
    if (i == games.size()) throw std::out_of_range("no game '" + id + "' in table");
    out.games.push_back(games[i]);
    out.values.push_back(values[i]);
  }
  return out;
}

RotationTable relative_rotation(const RotationTable& accumulated) {
  RotationTable phi = accumulated;
  for (std::size_t g = 0; g < phi.values.size(); ++g) {
    if (phi.values[g].empty()) throw std::invalid_argument("empty row in rotation table");
    double mean = accumulated.row_mean(g);
    if (mean == 0.0) {
      throw DegenerateRowMean("row mean of game '" + accumulated.games.at(g) + "' is zero");
    }
    for (double& v : phi.values[g]) v /= mean;
  }
  return phi;
}

std::vector<double> response_coefficients(const RotationTable& phi) {
  if (phi.values.empty()) throw std::invalid_argument("no game rows");
  std::size_t groups = phi.values.front().size();
  std::vector<double> out(groups, 0.0);
  for (const auto& row : phi.values) {
    if (row.size() != groups) throw std::invalid_argument("ragged rotation table");
    for (std::size_t j = 0; j < groups; ++j) out[j] += row[j];
  }
  for (double& v : out) v /= static_cast<double>(phi.values.size());
  return out;
}

CycleIndex cycle_rotation_index(const Trajectory& traj, const RationalPoint& nash,
                                std::optional<RationalPoint> anchor) {
  if (!(nash.p > 0 && nash.p < 1 && nash.q > 0 && nash.q < 1)) {
    throw std::invalid_argument("cycle rotation index needs an interior equilibrium");
  }
  traj.population_size();
  const RationalPoint end = anchor.value_or(RationalPoint{nash.p, Rational(0)});
  const RationalPoint wire = minus(end, nash);
  if (wire.p == Rational(0) && wire.q == Rational(0)) throw std::invalid_argument("degenerate tripwire");

  auto side = [&](const RationalPoint& x) { return sign(cross(wire, minus(x, nash))); };
  // Position of a point on the tripwire line, 0 at nash and 1 at the anchor.
  auto along = [&](const RationalPoint& x) { return dot(minus(x, nash), wire) / dot(wire, wire); };

  CycleIndex out;
  std::optional<RationalPoint> last_off;  // last state strictly off the line
  std::optional<RationalPoint> last_on;   // on-line state reached since then
  for (const auto& s : traj.states) {
    RationalPoint x = point_of(s);
    int sx = side(x);
    if (sx == 0) {
      last_on = x;
      continue;
    }
    if (last_off && side(*last_off) == -sx) {
      Rational pos;
      if (last_on) {
        pos = along(*last_on);
      } else {
        RationalPoint step = minus(x, *last_off);
        pos = cross(minus(*last_off, nash), step) / cross(wire, step);
      }
      if (pos >= 0 && pos <= 1) {
        // From the negative to the positive side is counterclockwise about nash.
        (sx > 0 ? out.counterclockwise : out.clockwise) += 1;
      }
    }
    last_off = x;
    last_on.reset();
  }

  int total = out.counterclockwise + out.clockwise;
  out.no_crossings = total == 0;
  out.value = total == 0 ? 0.0
                         : static_cast<double>(out.counterclockwise - out.clockwise) / total;
  return out;
}

double average_distance(const Trajectory& traj, const RationalPoint& nash) {
  if (traj.states.empty()) return 0.0;
  const double np = to_double(nash.p);
  const double nq = to_double(nash.q);
  double sum = 0.0;
  for (const auto& s : traj.states) {
    sum += std::hypot(to_double(s.p()) - np, to_double(s.q()) - nq);
  }
  return sum / static_cast<double>(traj.states.size());
}

RotationReport make_report(const Trajectory& traj, const std::optional<RationalPoint>& nash) {
  RotationReport r;
  r.group_id = traj.group_id;
  r.game_id = traj.game_id;
  r.l_series = rotation_series(traj);
  r.l_accumulated = std::accumulate(r.l_series.begin(), r.l_series.end(), Rational(0));
  r.l_mean = r.l_accumulated / static_cast<std::int64_t>(r.l_series.size());
  if (nash) {
    r.avg_distance = average_distance(traj, *nash);
    if (nash->p > 0 && nash->p < 1 && nash->q > 0 && nash->q < 1) {
      r.cri = cycle_rotation_index(traj, *nash);
    }
  }
  return r;
}

}  // namespace rotkit
