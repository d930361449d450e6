#pragma once

#include <cstdint>
#include <optional>

#include "reftor/io.hpp"

namespace reftor {

enum class SelftestLevel { quick, full };

struct SelftestOptions {
  std::uint64_t seed = 1;
  SelftestLevel level = SelftestLevel::quick;
  /// Replaces every upper-bound tolerance of the suites when set.
  std::optional<double> tol;
};

/// Runs the invariant suites of every module. Each check is named
/// "<suite>.<property>"; results hold the measured worst values. A suite that
/// throws records "<suite>.error" as a failed check with the message.
io::Report run_selftest(const SelftestOptions& options);

}  // namespace reftor
