#pragma once

#include <string>
#include <vector>

#include "wgimg/config.hpp"

namespace wgimg::tool {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed() const { return residual < threshold; }
};

/// Self-consistency checks on the configured scene: mode orthogonality on the
/// measurement grid, HPsi against the propagating Green derivative, H / H*
/// adjointness and the factorization identity.
std::vector<CheckResult> run_checks(const RunConfig& cfg, std::uint64_t seed);

}  // namespace wgimg::tool
