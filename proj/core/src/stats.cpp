#include "onoff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "onoff/error.hpp"

namespace onoff {

SampleSummary summarize(std::span<const double> sample) {
  SampleSummary s;
  s.n = sample.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : sample) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double x : sample) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / static_cast<double>(s.n - 1);
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
  return s;
}

SampleSummary summarize_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("paired samples differ in length");
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return summarize(d);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw InvalidArgument("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Pin the degenerate ends so "lower > 0" never comes from rounding.
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half),
          successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

OrderingReport nonincreasing_within(std::span<const std::vector<double>> samples, double z) {
  OrderingReport r;
  for (const auto& s : samples) r.means.push_back(summarize(s).mean);
  r.worst_z = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const SampleSummary d = summarize_difference(samples[k + 1], samples[k]);
    r.increments.push_back(d.mean);
    r.increment_std_errors.push_back(d.std_error);
    double score;
    if (d.std_error > 0.0) {
      score = d.mean / d.std_error;
    } else {
      score = d.mean > 0.0 ? std::numeric_limits<double>::infinity()
                           : (d.mean < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
    }
    r.worst_z = std::max(r.worst_z, score);
    if (d.mean > z * d.std_error) r.pass = false;
  }
  if (r.increments.empty()) r.worst_z = 0.0;
  return r;
}

double median(std::vector<double> sample) {
  if (sample.empty()) throw InvalidArgument("median of an empty sample");
  const auto mid = sample.begin() + static_cast<std::ptrdiff_t>(sample.size() / 2);
  std::nth_element(sample.begin(), mid, sample.end());
  double m = *mid;
  if (sample.size() % 2 == 0) m = 0.5 * (m + *std::max_element(sample.begin(), mid));
  return m;
}

}  // namespace onoff
