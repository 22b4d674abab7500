#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotkit::stats {

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using SampleGroups = std::vector<std::vector<double>>;

struct KruskalWallis {
  double h = 0.0;  // tie-corrected
  int df = 0;
  double p = 1.0;  // chi-square upper tail
};

/// Mid-ranks for ties; all-equal input yields H = 0, p = 1.
KruskalWallis kruskal_wallis(const SampleGroups& groups);

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Welch unequal-variance test with Welch-Satterthwaite df.
TTest welch_t(std::span<const double> x, std::span<const double> y);

/// One-sample t test of the mean against `mu`, two-sided.
TTest one_sample_t(std::span<const double> x, double mu);

/// Two-sided exact binomial p at probability 1/2.
double sign_test(int successes, int n);

double spearman_rank(std::span<const double> x, std::span<const double> y);

/// 1-based ranks with ties given their average rank.
std::vector<double> mid_ranks(std::span<const double> values);

/// Flat results row as emitted by the stats command.
struct TestResult {
  std::string name;
  double statistic = 0.0;
  double df = 0.0;
  double p = 1.0;
};

}  // namespace rotkit::stats
