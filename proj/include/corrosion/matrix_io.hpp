#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace corrosion {

/// Key/value provenance lines written as "# key=value" before the header.
using Provenance = std::vector<std::pair<std::string, std::string>>;

struct MatrixFile {
    Eigen::MatrixXd data;
    std::vector<std::string> columns;
    Provenance provenance;

    /// Value of a provenance key; empty when absent.
    std::string meta(const std::string& key) const;
};

/// Shortest round-trip decimal form ("inf", "-inf", "nan" for non-finite).
std::string format_number(double v);

/// CSV with optional "# key=value" lines, one header row, one row per matrix row.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& columns, const Provenance& provenance = {});
MatrixFile read_matrix_csv(const std::filesystem::path& path);

} // namespace corrosion
