#pragma once

#include "corrosion/geometry.hpp"
#include "corrosion/ntd.hpp"

#include <filesystem>
#include <string>

namespace corrosion {

/// Pipeline settings that may accompany a problem description.
struct RunSettings {
    Measure measure = Measure::ArcLength;
};

/// Parses a JSON problem description (schema in docs/config.md) and returns
/// a validated spec. Throws ConfigError naming the offending key or invariant.
ProblemSpec load_spec(const std::string& config_text, RunSettings* settings = nullptr);
ProblemSpec load_spec_file(const std::filesystem::path& path, RunSettings* settings = nullptr);

} // namespace corrosion
