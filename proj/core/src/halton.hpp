#pragma once

#include <cstdint>

namespace forte::detail {

inline constexpr unsigned kHaltonBases[] = {2, 3, 5, 7, 11, 13};

// Van der Corput radical inverse of `index` in `base`, in [0, 1).
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv_base = 1.0 / base;
  double scale = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return value;
}

}  // namespace forte::detail
