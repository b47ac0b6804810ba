#pragma once

namespace metaweave::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Full command-line entry point. Maps errors to exit codes: 0 success,
/// 1 usage, 2 input/parse, 3 numerical, 4 network.
int run(int argc, const char* const* argv);

} // namespace metaweave::cli
