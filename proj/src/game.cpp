#include "rotkit/game.hpp"

#include <cmath>

namespace rotkit {

PayoffMatrix PayoffMatrix::scaled(const Rational& k) const {
  PayoffMatrix out = *this;
  for (auto& row : out.m) {
    for (auto& v : row) v *= k;
  }
  return out;
}

AntiDiagonal reduce_to_antidiagonal(const PayoffMatrix& m) {
  // Column player's matrix is B = -M^T; subtracting a constant from each
  // column of either matrix leaves the replicator field unchanged.
  return AntiDiagonal{
      m(0, 1) - m(1, 1),
      m(1, 0) - m(0, 0),
      m(1, 1) - m(1, 0),
      m(0, 0) - m(0, 1),
  };
}

NormalizedGame normalize(const AntiDiagonal& raw) {
  if (raw.a * raw.b > 0 && raw.c * raw.d > 0) {
    Rational row_scale = abs(raw.a + raw.b);
    Rational col_scale = abs(raw.c + raw.d);
    return NormalizedGame{raw.a / row_scale, raw.b / row_scale, raw.c / col_scale,
                          raw.d / col_scale, GameClass::InteriorMSNE};
  }
  return NormalizedGame{raw.a, raw.b, raw.c, raw.d, GameClass::Trivial};
}

RationalPoint interior_equilibrium(const NormalizedGame& g) {
  if (!g.interior()) {
    throw NotMsneError("game has no interior mixed equilibrium");
  }
  return RationalPoint{g.c / (g.c + g.d), g.a / (g.a + g.b)};
}

double eigenvalue_magnitude(const NormalizedGame& g) {
  if (!g.interior()) {
    throw NotMsneError("eigenvalue undefined for a trivial game");
  }
  return std::sqrt(to_double(g.a * g.b * g.c * g.d));
}

int rotation_direction(const NormalizedGame& g) {
  if (!g.interior() || g.a * g.c > 0) return 0;
  return sign(g.a);
}

std::optional<RationalPoint> dominance_equilibrium(const PayoffMatrix& m) {
  std::array<bool, 2> row_alive{true, true};
  std::array<bool, 2> col_alive{true, true};

  // Row payoff of (r, c) is m(r, c); column payoff is -m(r, c).
  auto row_dominates = [&](int r, int other) {
    for (int c = 0; c < 2; ++c) {
      if (col_alive[c] && !(m(r, c) > m(other, c))) return false;
    }
    return true;
  };
  auto col_dominates = [&](int c, int other) {
    for (int r = 0; r < 2; ++r) {
      if (row_alive[r] && !(-m(r, c) > -m(r, other))) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    if (row_alive[0] && row_alive[1]) {
      for (int r = 0; r < 2; ++r) {
        if (row_dominates(r, 1 - r)) {
          row_alive[1 - r] = false;
          changed = true;
          break;
        }
      }
    }
    if (col_alive[0] && col_alive[1]) {
      for (int c = 0; c < 2; ++c) {
        if (col_dominates(c, 1 - c)) {
          col_alive[1 - c] = false;
          changed = true;
          break;
        }
      }
    }
  }

  if (row_alive[0] == row_alive[1] || col_alive[0] == col_alive[1]) {
    return std::nullopt;
  }
  return RationalPoint{Rational(row_alive[0] ? 1 : 0), Rational(col_alive[0] ? 1 : 0)};
}

GamePrediction predict(const PayoffMatrix& m) {
  GamePrediction out;
  out.game = normalize(reduce_to_antidiagonal(m));
  out.cls = out.game.cls;
  out.direction = rotation_direction(out.game);
  if (out.game.interior()) {
    out.nash = interior_equilibrium(out.game);
    if (out.direction != 0) out.lambda = eigenvalue_magnitude(out.game);
  } else {
    out.nash = dominance_equilibrium(m);
  }
  return out;
}

PayoffMatrix companion_matrix(const AntiDiagonal& t) {
  if (t.a + t.b + t.c + t.d != Rational(0)) {
    throw std::invalid_argument("a + b + c + d must vanish for a zero-sum companion");
  }
  PayoffMatrix out;
  out(1, 1) = 0;
  out(0, 1) = t.a;
  out(1, 0) = -t.c;
  out(0, 0) = -t.c - t.b;
  return out;
}

std::string to_string(GameClass cls) {
  return cls == GameClass::InteriorMSNE ? "InteriorMSNE" : "Trivial";
}

}  // namespace rotkit
