#pragma once

// Companion 2x2 zero-sum games. A payoff matrix is reduced to its normalized
// anti-diagonal form, from which the replicator dynamics give predictions
// for the equilibrium and for rotation strength and direction.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "rotkit/rational.hpp"

namespace rotkit {

class NotMsneError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Row player's payoffs; the column player receives the negation.
struct PayoffMatrix {
  std::array<std::array<Rational, 2>, 2> m{};

  const Rational& operator()(int row, int col) const { return m[row][col]; }
  Rational& operator()(int row, int col) { return m[row][col]; }

  PayoffMatrix scaled(const Rational& k) const;
  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;
};

/// Off-diagonal payoffs (a, b) of the row player and (c, d) of the column
/// player once each player's matrix is shifted to zero diagonals.
struct AntiDiagonal {
  Rational a, b, c, d;
  friend bool operator==(const AntiDiagonal&, const AntiDiagonal&) = default;
};

enum class GameClass { InteriorMSNE, Trivial };

struct NormalizedGame {
  Rational a, b, c, d;
  GameClass cls = GameClass::Trivial;

  bool interior() const { return cls == GameClass::InteriorMSNE; }
  friend bool operator==(const NormalizedGame&, const NormalizedGame&) = default;
};

struct RationalPoint {
  Rational p, q;
  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

struct GamePrediction {
  GameClass cls = GameClass::Trivial;
  NormalizedGame game;
  // Empty when iterated strict dominance leaves more than one profile.
  std::optional<RationalPoint> nash;
  double lambda = 0.0;
  int direction = 0;  // +1 counterclockwise, -1 clockwise, 0 none
};

AntiDiagonal reduce_to_antidiagonal(const PayoffMatrix& m);

/// Scales each player's pair to |a+b| = |c+d| = 1 when ab > 0 and cd > 0;
/// otherwise the game is Trivial and the raw values are kept.
NormalizedGame normalize(const AntiDiagonal& raw);

/// (c/(c+d), a/(a+b)), i.e. (|c|, |a|) after normalization.
RationalPoint interior_equilibrium(const NormalizedGame& g);

/// sqrt(abcd): modulus of the purely imaginary Jacobian eigenvalues at the
/// interior rest point.
double eigenvalue_magnitude(const NormalizedGame& g);

/// Linearized rotation sense at the interior rest point. Trivial games and
/// interior saddles (a*c > 0, impossible for zero-sum input) give 0.
int rotation_direction(const NormalizedGame& g);

/// Pure profile surviving iterated elimination of strictly dominated
/// strategies, as densities (p, q) of the first strategies.
std::optional<RationalPoint> dominance_equilibrium(const PayoffMatrix& m);

GamePrediction predict(const PayoffMatrix& m);

/// Zero-sum matrix whose reduction is exactly (a, b, c, d). Requires
/// a + b + c + d = 0, which every zero-sum reduction satisfies.
PayoffMatrix companion_matrix(const AntiDiagonal& target);

std::string to_string(GameClass cls);

}  // namespace rotkit
