#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace onoff {

/// Mean, unbiased variance and standard error of a sample, accumulated in
/// index order so the result does not depend on how the sample was produced.
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

SampleSummary summarize(std::span<const double> sample);

/// Summary of the paired differences a[k] - b[k].
SampleSummary summarize_difference(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

}  // namespace onoff

namespace onoff {

/// Checks that the means of paired samples taken at successive checkpoints
/// do not increase by more than z standard errors of the paired difference:
/// mean(k+1) - mean(k) <= z * se(k+1 - k) for every k.
struct OrderingReport {
  bool pass = true;
  std::vector<double> means;
  std::vector<double> increments;
  std::vector<double> increment_std_errors;
  /// Largest increment / std_error (positive means an increase).
  double worst_z = 0.0;
};

OrderingReport nonincreasing_within(std::span<const std::vector<double>> samples, double z = 3.0);

double median(std::vector<double> sample);

}  // namespace onoff
