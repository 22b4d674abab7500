#pragma once

// Trajectory generators. The continuous side is the two-population replicator
// field with an RK4 integrator and its first integral. The discrete side is
// a random-matching agent simulator driven by a payoff schedule.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rotkit/game.hpp"
#include "rotkit/rotation.hpp"

namespace rotkit {

class NonInteriorStart : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BoundaryState : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EmptySchedule : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
struct Velocity {
  T dp{};
  T dq{};
};

/// dp = p(1-p)(a - (a+b)q), dq = q(1-q)(c - (c+d)p).
Velocity<double> replicator_velocity(const NormalizedGame& g, double p, double q);
Velocity<Rational> replicator_velocity(const NormalizedGame& g, const Rational& p,
                                       const Rational& q);

/// H = c ln p + d ln(1-p) - a ln q - b ln(1-q), constant along exact orbits.
double conserved_quantity(const NormalizedGame& g, double p, double q);

struct OdePoint {
  double p = 0.0;
  double q = 0.0;
};

struct OdePath {
  std::vector<OdePoint> points;  // n_steps + 1 samples, points[0] = start
  double step = 0.0;
  double h_start = 0.0;
  double h_end = 0.0;
  double h_drift() const { return h_end - h_start; }
};

inline constexpr double kClampEpsilon = 1e-12;

/// Fixed-step classical RK4, clamped to [1e-12, 1 - 1e-12] after each step.
/// H is reported for interior-MSNE games and left 0 otherwise.
OdePath integrate_ode(const NormalizedGame& g, OdePoint start, double step, int n_steps);

/// Cross-product rotation of a real-valued path (about the origin).
double accumulated_rotation(const OdePath& path);
double mean_rotation(const OdePath& path);

struct FieldSample {
  double p = 0.0;
  double q = 0.0;
  Velocity<double> v;
};

/// grid_n x grid_n samples on the uniform grid over [0,1]^2, p varying fastest.
std::vector<FieldSample> phase_field_sample(const NormalizedGame& g, int grid_n);

struct ScheduleEntry {
  std::string game_id;
  PayoffMatrix payoff;
  int rounds = 0;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;

  int total_rounds() const;
  /// Throws on empty schedules, non-positive counts, or repeated ids.
  void validate() const;
};

struct LogitFictitiousPlay {
  double recency = 0.1;    // weight of the newest forgone payoff, in (0, 1]
  double precision = 5.0;  // logit sensitivity, >= 0
};

struct ProportionalImitation {
  double rate = 1.0;  // in (0, 1]
};

using ChoiceRule = std::variant<LogitFictitiousPlay, ProportionalImitation>;

struct SimConfig {
  int population_size = 6;
  std::uint64_t seed = 1;
  ChoiceRule rule = LogitFictitiousPlay{};
  double tremble = 0.01;  // probability of a uniform random choice, in [0, 1]

  void validate() const;
};

/// Portable seeded generator: bit-identical streams on every platform.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();                        // [0, 1)
  std::uint64_t below(std::uint64_t bound);  // [0, bound)
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

enum class Role { X, Y };

struct AgentPopulation {
  Role role = Role::X;
  std::vector<std::uint8_t> strategy;          // 1 = first strategy, 0 = second
  std::vector<std::array<double, 2>> attraction;  // [first, second]
  std::vector<double> last_payoff;

  int count_first() const;
};

/// One trajectory per schedule entry; the round in which the payoff matrix
/// changes begins a new segment, so no transition spans two matrices.
std::vector<Trajectory> simulate_agents(const Schedule& schedule, const SimConfig& config,
                                        const std::string& group_id = "1");

}  // namespace rotkit
