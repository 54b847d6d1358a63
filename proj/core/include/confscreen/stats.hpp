#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace confscreen {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Quantile of the standard normal distribution, p in (0, 1).
double normal_quantile(double p);

// Two-sided p-value for a t statistic with df degrees of freedom.
double t_two_sided_p(double t, double df);

// Mid-ranks (1-based, ties get the average rank).
std::vector<double> mid_ranks(const std::vector<double>& values);

// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

// Linearly interpolated quantile of a sample, q in [0, 1]. Sorts a copy.
double sample_quantile(std::vector<double> values, double q);

double mean_of(const std::vector<double>& values);

}  // namespace confscreen
