#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sawcomb::io {

/// Shortest round-trippable decimal form; output is identical across runs.
std::string format_double(double v);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m, const std::vector<std::string>& header = {});
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Reads a dense numeric CSV. A first line containing non-numeric cells is
/// treated as a header and skipped.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Writes text atomically enough for our purposes: the file is truncated first.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace sawcomb::io
