#pragma once

// Rotation observables of population-state trajectories. The core quantity
// is the planar cross product of consecutive states. Tables of accumulated
// rotation give relative rotation and per-group response coefficients. The
// cycle rotation index and average distance are kept for comparison.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotkit/game.hpp"
#include "rotkit/rational.hpp"

namespace rotkit {

class MismatchedPopulationSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TooShortTrajectory : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateRowMean : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Counts of strategy-1 agents in populations X and Y, each of size n.
class PopulationState {
 public:
  PopulationState(int p_count, int q_count, int n);

  int p_count() const { return p_count_; }
  int q_count() const { return q_count_; }
  int n() const { return n_; }
  Rational p() const { return Rational(p_count_, n_); }
  Rational q() const { return Rational(q_count_, n_); }

  friend bool operator==(const PopulationState&, const PopulationState&) = default;

 private:
  int p_count_;
  int q_count_;
  int n_;
};

struct Trajectory {
  std::vector<PopulationState> states;  // states[t], one per round
  std::string group_id;
  std::string game_id;

  std::size_t rounds() const { return states.size(); }
  /// Throws MismatchedPopulationSize unless every state shares one n.
  int population_size() const;
};

/// p(t) q(t+1) - q(t) p(t+1).
Rational instantaneous_rotation(const PopulationState& x, const PopulationState& next);

/// Same cross product with both states measured from `center` instead of the
/// origin. Not used by any default observable.
Rational instantaneous_rotation_about(const PopulationState& x, const PopulationState& next,
                                      const RationalPoint& center);

/// The T-1 per-transition rotations.
std::vector<Rational> rotation_series(const Trajectory& traj);
/// Running sum of rotation_series (length T-1).
std::vector<Rational> cumulative_rotation(const Trajectory& traj);

Rational accumulated_rotation(const Trajectory& traj);
/// accumulated_rotation / (T-1).
Rational mean_rotation(const Trajectory& traj);

/// Values indexed [game][group]; rows are games, columns are groups.
struct RotationTable {
  std::vector<std::string> games;
  std::vector<std::string> groups;
  std::vector<std::vector<double>> values;

  double row_mean(std::size_t game) const;
  RotationTable select_games(const std::vector<std::string>& ids) const;
};

/// Each entry divided by its row mean.
RotationTable relative_rotation(const RotationTable& accumulated);

/// Per-group (column) mean of the relative rotation.
std::vector<double> response_coefficients(const RotationTable& phi);

struct CycleIndex {
  double value = 0.0;
  int counterclockwise = 0;
  int clockwise = 0;
  bool no_crossings = true;
};

/// Signed crossings of the tripwire segment nash -> anchor. The anchor
/// defaults to the boundary point (p*, 0) below the equilibrium.
CycleIndex cycle_rotation_index(const Trajectory& traj, const RationalPoint& nash,
                                std::optional<RationalPoint> anchor = std::nullopt);

double average_distance(const Trajectory& traj, const RationalPoint& nash);

struct RotationReport {
  std::string group_id;
  std::string game_id;
  std::vector<Rational> l_series;
  Rational l_accumulated;
  Rational l_mean;
  std::optional<CycleIndex> cri;
  std::optional<double> avg_distance;
};

/// Full report; CRI and distance are filled only when an interior `nash` is
/// supplied.
RotationReport make_report(const Trajectory& traj,
                           const std::optional<RationalPoint>& nash = std::nullopt);

}  // namespace rotkit
