#include "rotkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace rotkit::stats {

namespace {

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x, double m) {
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double two_sided_t_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

}  // namespace

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

KruskalWallis kruskal_wallis(const SampleGroups& groups) {
  if (groups.size() < 2) throw std::invalid_argument("Kruskal-Wallis needs >= 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("Kruskal-Wallis group is empty");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double n = static_cast<double>(pooled.size());
  if (pooled.size() < 3) throw std::invalid_argument("Kruskal-Wallis needs >= 3 observations");

  KruskalWallis out;
  out.df = static_cast<int>(groups.size()) - 1;
  auto ranks = mid_ranks(pooled);

  double sum_term = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double r = std::accumulate(ranks.begin() + static_cast<std::ptrdiff_t>(offset),
                               ranks.begin() + static_cast<std::ptrdiff_t>(offset + g.size()), 0.0);
    sum_term += r * r / static_cast<double>(g.size());
    offset += g.size();
  }
  double h = 12.0 / (n * (n + 1.0)) * sum_term - 3.0 * (n + 1.0);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  double correction = 1.0 - ties / (n * n * n - n);
  if (correction <= 0.0) return out;  // every observation equal

  out.h = std::max(0.0, h / correction);
  boost::math::chi_squared dist(out.df);
  out.p = boost::math::cdf(boost::math::complement(dist, out.h));
  return out;
}

TTest welch_t(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) throw std::invalid_argument("t test needs >= 2 per sample");
  const double mx = mean(x), my = mean(y);
  const double vx = sample_variance(x, mx) / static_cast<double>(x.size());
  const double vy = sample_variance(y, my) / static_cast<double>(y.size());
  TTest out;
  const double se2 = vx + vy;
  if (se2 == 0.0) {
    out.df = static_cast<double>(x.size() + y.size() - 2);
    if (mx == my) return out;
    out.t = mx > my ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.t = (mx - my) / std::sqrt(se2);
  out.df = se2 * se2 /
           (vx * vx / static_cast<double>(x.size() - 1) + vy * vy / static_cast<double>(y.size() - 1));
  out.p = two_sided_t_p(out.t, out.df);
  return out;
}

TTest one_sample_t(std::span<const double> x, double mu) {
  if (x.size() < 2) throw std::invalid_argument("t test needs >= 2 observations");
  const double m = mean(x);
  const double se = std::sqrt(sample_variance(x, m) / static_cast<double>(x.size()));
  TTest out;
  out.df = static_cast<double>(x.size() - 1);
  if (se == 0.0) {
    if (m == mu) return out;
    out.t = m > mu ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.t = (m - mu) / se;
  out.p = two_sided_t_p(out.t, out.df);
  return out;
}

double sign_test(int successes, int n) {
  if (n < 0 || successes < 0 || successes > n) {
    throw std::invalid_argument("sign test needs 0 <= successes <= n");
  }
  if (n == 0) return 1.0;
  const int tail = std::min(successes, n - successes);
  // Summed in log space so large n stays finite.
  double p = 0.0;
  for (int k = 0; k <= tail; ++k) {
    double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                      n * std::log(2.0);
    p += std::exp(log_term);
  }
  return std::min(1.0, 2.0 * p);
}

double spearman_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("Spearman inputs differ in length");
  if (x.size() < 2) throw std::invalid_argument("Spearman needs >= 2 pairs");
  auto rx = mid_ranks(x);
  auto ry = mid_ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace rotkit::stats
