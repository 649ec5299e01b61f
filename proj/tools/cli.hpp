#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace forte::cli {

// Process exit statuses besides the forte::ErrorCode values.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitReplayMismatch = 70;

// Parses argv (without the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// "default" and "literal" name the shipped configs; anything else is a path.
std::filesystem::path resolve_arm_path(const std::string& spec);
std::filesystem::path default_bom_path();

}  // namespace forte::cli
