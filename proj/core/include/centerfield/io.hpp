#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>

namespace centerfield {

/// Byte-stable exports: decimal, 17 significant digits, '.' separator, LF
/// line endings, independent of locale.

std::string format_double(double value);
std::string format_vector(const Eigen::VectorXd& v); ///< comma separated

/// Write with LF endings regardless of platform.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

} // namespace centerfield
