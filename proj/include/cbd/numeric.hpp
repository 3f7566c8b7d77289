#pragma once

#include <cmath>

namespace cbd {

// Half-up rounding to a fixed number of decimals, used wherever percentages
// are presented at 2 decimals.
inline double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.5) / scale;
}

}  // namespace cbd
