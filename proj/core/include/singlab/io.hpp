#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace singlab {

/// Fixed numeric text form used by every artifact: 17 significant digits,
/// `.` decimal separator, independent of the process locale.
std::string format_real(double value);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace singlab
