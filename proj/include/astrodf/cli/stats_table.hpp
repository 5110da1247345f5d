#pragma once

#include <vector>

namespace astrodf::cli {

/// Linear-interpolation quantile (Hyndman-Fan type 7). NaNs are dropped;
/// returns NaN when nothing is left.
double quantile(std::vector<double> values, double q);

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

}  // namespace astrodf::cli
