#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace plpca::csv {

struct Table {
    std::vector<std::vector<std::string>> rows;
    std::vector<long> lines; ///< 1-based source line of each row
};

/// Reads a comma-separated file. Blank lines are skipped; fields are trimmed
/// and may be double-quoted. Throws Error(io) if the file cannot be opened.
Table read(const std::filesystem::path& path);

Table parse(std::string_view text);

/// Parses a finite double, or returns false.
bool to_double(std::string_view field, double& out);

/// Shortest round-trip decimal representation.
std::string format(double value);

/// Writes via a temporary sibling file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Matrix as CSV. With a non-empty header the first line lists the column
/// names; with non-empty row_ids each line starts with its id.
std::string matrix_to_csv(const Eigen::MatrixXd& M, const std::vector<std::string>& header = {},
                          const std::vector<std::string>& row_ids = {});

/// Sparse coordinate dump: one "row col value" line per nonzero.
std::string matrix_to_coo(const Eigen::MatrixXd& M);

} // namespace plpca::csv
