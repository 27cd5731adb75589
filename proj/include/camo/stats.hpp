#pragma once

#include <cstdint>
#include <vector>

namespace camo {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// p +- 1.96 sqrt(p (1 - p) / n).
Interval proportion_ci(double p, int n);

double mean(const std::vector<double>& x);
double sample_sd(const std::vector<double>& x);
double median(std::vector<double> x);

/// mean +- 1.96 sd / sqrt(n).
Interval mean_ci(const std::vector<double>& x);

/// Percentile bootstrap (2.5 %, 97.5 %) of the median.
Interval bootstrap_median_ci(const std::vector<double>& x, int resamples, uint64_t seed);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df = 0.0;  // t-test only
};

/// Two-sided Welch t-test.
TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Two-sided Mann-Whitney U test, normal approximation with tie correction
/// and continuity correction. `statistic` is U of the first sample.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace camo
