#include "mcd/robust.hpp"

#include <algorithm>
#include <cmath>

#include "mcd/error.hpp"

namespace mcd {

double median_inplace(std::span<double> values) {
    if (values.empty()) throw InvalidInput("median of an empty set");
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return lower + 0.5 * (upper - lower);
}

double mad_sigma(std::span<const double> values) {
    std::vector<double> work(values.begin(), values.end());
    const double center = median_inplace(work);
    for (std::size_t i = 0; i < values.size(); ++i) work[i] = std::abs(values[i] - center);
    return 1.4826 * median_inplace(work);
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace mcd
