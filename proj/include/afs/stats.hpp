// Small statistics toolbox: exact binomial (Clopper-Pearson) intervals,
// Kolmogorov-Smirnov distance, Spearman rank correlation, and a normal-
// approximation interval for means of bounded samples.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace afs {

// Regularized incomplete beta function I_x(a, b).
double reg_inc_beta(double a, double b, double x);

struct BinomialCI {
  double lower = 0.0, upper = 1.0;
};

// Two-sided Clopper-Pearson interval at the given confidence (default 95%).
BinomialCI clopper_pearson(uint64_t successes, uint64_t n, double confidence = 0.95);

struct EstimatorResult {
  std::string name;
  uint64_t n = 0;
  uint64_t successes = 0;
  double p_hat = 0.0;
  BinomialCI ci;
  uint64_t master_seed = 0;
  std::string params;  // free-form parameter echo for provenance

  static EstimatorResult from_counts(std::string name, uint64_t successes, uint64_t n,
                                     uint64_t seed, std::string params = {});
};

// sup_t |F_hat(t) - F(t)| for sorted samples against an analytic CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Spearman rank correlation; ties get average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct MeanCI {
  double mean = 0.0, lower = 0.0, upper = 0.0, stderr_ = 0.0;
  uint64_t n = 0;
};

// Normal-approximation CI for the mean of [0,1]-bounded samples.
MeanCI mean_ci(const std::vector<double>& xs, double confidence = 0.95);

}  // namespace afs
