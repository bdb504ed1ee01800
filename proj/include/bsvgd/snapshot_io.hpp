#pragma once

#include "bsvgd/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bsvgd {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a full field as a double.
double parse_double(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

/// Snapshot CSV: header `x0,...,x{d-1},color`, one row per particle, color as E/O/S.
void write_snapshot_csv(std::ostream& out, const ParticleCloud& cloud);
void write_snapshot_csv(const std::filesystem::path& path, const ParticleCloud& cloud);

ParticleCloud read_snapshot_csv(std::istream& in);
ParticleCloud read_snapshot_csv(const std::filesystem::path& path);

}  // namespace bsvgd
