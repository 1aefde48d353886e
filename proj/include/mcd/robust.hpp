#pragma once

#include <span>
#include <vector>

namespace mcd {

/// Median; an even count yields the midpoint of the two central order
/// statistics. Reorders `values` in place.
double median_inplace(std::span<double> values);

inline double median(std::vector<double> values) { return median_inplace(values); }

/// 1.4826 * median(|y - median(y)|), a consistent estimate of sigma for
/// Gaussian data.
double mad_sigma(std::span<const double> values);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);

}  // namespace mcd
