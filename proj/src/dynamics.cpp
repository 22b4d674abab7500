#include "rotkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rotkit {

Velocity<double> replicator_velocity(const NormalizedGame& g, double p, double q) {
  const double a = to_double(g.a), b = to_double(g.b);
  const double c = to_double(g.c), d = to_double(g.d);
  return {p * (1 - p) * (a - (a + b) * q), q * (1 - q) * (c - (c + d) * p)};
}

Velocity<Rational> replicator_velocity(const NormalizedGame& g, const Rational& p,
                                       const Rational& q) {
  return {p * (1 - p) * (g.a - (g.a + g.b) * q), q * (1 - q) * (g.c - (g.c + g.d) * p)};
}

double conserved_quantity(const NormalizedGame& g, double p, double q) {
  if (!g.interior()) throw NotMsneError("no first integral for a trivial game");
  if (!(p > 0 && p < 1 && q > 0 && q < 1)) {
    throw BoundaryState("first integral is undefined on the boundary");
  }
  return to_double(g.c) * std::log(p) + to_double(g.d) * std::log1p(-p) -
         to_double(g.a) * std::log(q) - to_double(g.b) * std::log1p(-q);
}

OdePath integrate_ode(const NormalizedGame& g, OdePoint start, double step, int n_steps) {
  if (!(start.p > 0 && start.p < 1 && start.q > 0 && start.q < 1)) {
    throw NonInteriorStart("integration must start strictly inside the unit square");
  }
  if (!(step > 0)) throw std::invalid_argument("step must be positive");
  if (n_steps < 0) throw std::invalid_argument("negative step count");

  auto f = [&](OdePoint x) { return replicator_velocity(g, x.p, x.q); };
  auto clamp = [](double v) { return std::clamp(v, kClampEpsilon, 1 - kClampEpsilon); };

  OdePath path;
  path.step = step;
  path.points.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.points.push_back(start);
  OdePoint x = start;
  for (int i = 0; i < n_steps; ++i) {
    auto k1 = f(x);
    auto k2 = f({x.p + 0.5 * step * k1.dp, x.q + 0.5 * step * k1.dq});
    auto k3 = f({x.p + 0.5 * step * k2.dp, x.q + 0.5 * step * k2.dq});
    auto k4 = f({x.p + step * k3.dp, x.q + step * k3.dq});
    x.p = clamp(x.p + step / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp));
    x.q = clamp(x.q + step / 6 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq));
    path.points.push_back(x);
  }
  if (g.interior()) {
    path.h_start = conserved_quantity(g, start.p, start.q);
    path.h_end = conserved_quantity(g, x.p, x.q);
  }
  return path;
}

double accumulated_rotation(const OdePath& path) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    const auto& u = path.points[i];
    const auto& v = path.points[i + 1];
    sum += u.p * v.q - u.q * v.p;
  }
  return sum;
}

double mean_rotation(const OdePath& path) {
  if (path.points.size() < 2) throw TooShortTrajectory("path has no transitions");
  return accumulated_rotation(path) / static_cast<double>(path.points.size() - 1);
}

std::vector<FieldSample> phase_field_sample(const NormalizedGame& g, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("grid needs at least two points per axis");
  std::vector<FieldSample> out;
  out.reserve(static_cast<std::size_t>(grid_n) * grid_n);
  for (int j = 0; j < grid_n; ++j) {
    for (int i = 0; i < grid_n; ++i) {
      // Exact grid coordinates so corner and edge samples vanish exactly.
      Rational p(i, grid_n - 1), q(j, grid_n - 1);
      auto v = replicator_velocity(g, p, q);
      out.push_back({to_double(p), to_double(q), {to_double(v.dp), to_double(v.dq)}});
    }
  }
  return out;
}

int Schedule::total_rounds() const {
  int total = 0;
  for (const auto& e : entries) total += e.rounds;
  return total;
}

void Schedule::validate() const {
  if (entries.empty()) throw EmptySchedule("schedule has no entries");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.rounds < 1) {
      throw std::invalid_argument("game '" + e.game_id + "' needs at least one round");
    }
    if (!seen.insert(e.game_id).second) {
      throw std::invalid_argument("game id '" + e.game_id + "' repeats in schedule");
    }
  }
}

void SimConfig::validate() const {
  if (population_size < 1) throw std::invalid_argument("population size must be >= 1");
  if (!(tremble >= 0 && tremble <= 1)) throw std::invalid_argument("tremble must be in [0, 1]");
  if (const auto* lfp = std::get_if<LogitFictitiousPlay>(&rule)) {
    if (!(lfp->recency > 0 && lfp->recency <= 1)) {
      throw std::invalid_argument("recency weight must be in (0, 1]");
    }
    if (!(lfp->precision >= 0)) throw std::invalid_argument("logit precision must be >= 0");
  } else {
    const auto& imit = std::get<ProportionalImitation>(rule);
    if (!(imit.rate > 0 && imit.rate <= 1)) {
      throw std::invalid_argument("imitation rate must be in (0, 1]");
    }
  }
}

double SimRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SimRng::below(std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

int AgentPopulation::count_first() const {
  return static_cast<int>(std::count(strategy.begin(), strategy.end(), std::uint8_t{1}));
}

namespace {

// Payoff to `role` playing `own` (1 = first strategy) against `other`.
double payoff(const std::array<std::array<double, 2>, 2>& row_payoff, Role role, int own,
              int other) {
  // Strategy 1 maps to index 0.
  if (role == Role::X) return row_payoff[1 - own][1 - other];
  return -row_payoff[1 - other][1 - own];
}

AgentPopulation make_population(Role role, int n, SimRng& rng) {
  AgentPopulation pop;
  pop.role = role;
  pop.strategy.resize(n);
  for (auto& s : pop.strategy) s = rng.coin() ? 1 : 0;
  pop.attraction.assign(n, {0.0, 0.0});
  pop.last_payoff.assign(n, 0.0);
  return pop;
}

class Simulator {
 public:
  explicit Simulator(const SimConfig& config)
      : config_(config),
        rng_(config.seed),
        x_(make_population(Role::X, config.population_size, rng_)),
        y_(make_population(Role::Y, config.population_size, rng_)),
        partner_(config.population_size) {}

  void play_round(const std::array<std::array<double, 2>, 2>& m, double payoff_range) {
    const int n = config_.population_size;
    for (int i = 0; i < n; ++i) partner_[i] = i;
    for (int i = n - 1; i > 0; --i) {
      auto j = static_cast<int>(rng_.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(partner_[i], partner_[j]);
    }

    std::vector<std::uint8_t> x_seen(n), y_seen(n);
    for (int i = 0; i < n; ++i) {
      int j = partner_[i];
      x_seen[i] = y_.strategy[j];
      y_seen[j] = x_.strategy[i];
      x_.last_payoff[i] = payoff(m, Role::X, x_.strategy[i], y_.strategy[j]);
      y_.last_payoff[j] = payoff(m, Role::Y, y_.strategy[j], x_.strategy[i]);
    }

    if (const auto* lfp = std::get_if<LogitFictitiousPlay>(&config_.rule)) {
      update_logit(x_, x_seen, m, *lfp);
      update_logit(y_, y_seen, m, *lfp);
    } else {
      const auto& imit = std::get<ProportionalImitation>(config_.rule);
      update_imitation(x_, imit, payoff_range);
      update_imitation(y_, imit, payoff_range);
    }
  }

  PopulationState state() const {
    return PopulationState(x_.count_first(), y_.count_first(), config_.population_size);
  }

 private:
  bool tremble() { return config_.tremble > 0 && rng_.uniform() < config_.tremble; }

  void update_logit(AgentPopulation& pop, const std::vector<std::uint8_t>& seen,
                    const std::array<std::array<double, 2>, 2>& m,
                    const LogitFictitiousPlay& rule) {
    for (std::size_t i = 0; i < pop.strategy.size(); ++i) {
      auto& att = pop.attraction[i];
      for (int own = 1; own >= 0; --own) {
        double& a = att[1 - own];
        a = (1 - rule.recency) * a + rule.recency * payoff(m, pop.role, own, seen[i]);
      }
      if (tremble()) {
        pop.strategy[i] = rng_.coin() ? 1 : 0;
        continue;
      }
      double p_first = 1.0 / (1.0 + std::exp(-rule.precision * (att[0] - att[1])));
      pop.strategy[i] = rng_.uniform() < p_first ? 1 : 0;
    }
  }

  void update_imitation(AgentPopulation& pop, const ProportionalImitation& rule,
                        double payoff_range) {
    const auto n = pop.strategy.size();
    const auto before = pop.strategy;
    for (std::size_t i = 0; i < n; ++i) {
      if (n > 1) {
        std::size_t k = rng_.below(n - 1);
        if (k >= i) ++k;
        double gain = pop.last_payoff[k] - pop.last_payoff[i];
        if (gain > 0 && payoff_range > 0 && rng_.uniform() < rule.rate * gain / payoff_range) {
          pop.strategy[i] = before[k];
        }
      }
      if (tremble()) pop.strategy[i] = rng_.coin() ? 1 : 0;
    }
  }

  SimConfig config_;
  SimRng rng_;
  AgentPopulation x_;
  AgentPopulation y_;
  std::vector<int> partner_;
};

}  // namespace

std::vector<Trajectory> simulate_agents(const Schedule& schedule, const SimConfig& config,
                                        const std::string& group_id) {
  schedule.validate();
  config.validate();

  Simulator sim(config);
  std::vector<Trajectory> out;
  out.reserve(schedule.entries.size());
  for (const auto& entry : schedule.entries) {
    std::array<std::array<double, 2>, 2> m{};
    double lo = to_double(entry.payoff(0, 0)), hi = lo;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        m[r][c] = to_double(entry.payoff(r, c));
        lo = std::min(lo, m[r][c]);
        hi = std::max(hi, m[r][c]);
      }
    }
    Trajectory traj;
    traj.group_id = group_id;
    traj.game_id = entry.game_id;
    traj.states.reserve(static_cast<std::size_t>(entry.rounds));
    for (int t = 0; t < entry.rounds; ++t) {
      traj.states.push_back(sim.state());
      sim.play_round(m, hi - lo);
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace rotkit
