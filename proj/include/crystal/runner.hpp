#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crystal/config.hpp"

namespace crystal {

/// Output files of one run as (path, contents), in write order.
using Artifacts = std::vector<std::pair<std::string, std::string>>;

/// Runs the configured mode and renders its outputs without touching disk.
/// Library errors propagate.
Artifacts execute(const RunConfig& cfg);

/// execute + write. Returns 0 on success; on failure prints one line
/// `error,<kind>,<message>` to err and returns nonzero.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Sets the OpenMP thread count (0 leaves the runtime default).
void set_threads(int n);

}  // namespace crystal
