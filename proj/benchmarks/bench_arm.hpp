#pragma once

#include <filesystem>

#include "forte/arm_model.hpp"

namespace forte::bench {

inline std::filesystem::path data_path(const char* relative) {
  return std::filesystem::path(FORTE_BENCH_DATA_DIR) / relative;
}

inline const ArmDescription& default_arm() {
  static const ArmDescription arm = load_arm(data_path("configs/forte_default.json")).arm;
  return arm;
}

}  // namespace forte::bench
