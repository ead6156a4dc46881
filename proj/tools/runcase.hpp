#pragma once

#include "runconfig.hpp"

namespace divcol::cli {

/// Execute the configured run and write report.json, profiles.csv and
/// field_samples.csv into the output directory. Throws on configuration or
/// solver errors (mapped to exit codes by the entry point).
void run(const RunConfig& config);

} // namespace divcol::cli
