#include "bsvgd/snapshot_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace bsvgd {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw InvalidArgument("cannot format number");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  if (!std::isfinite(value)) throw InvalidArgument("non-finite value: '" + std::string(text) + "'");
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void write_snapshot_csv(std::ostream& out, const ParticleCloud& cloud) {
  const Eigen::Index d = cloud.dimension();
  for (Eigen::Index k = 0; k < d; ++k) out << 'x' << k << ',';
  out << "color\n";
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out << format_double(cloud.positions()(k, i)) << ',';
    out << to_char(cloud.color(i)) << '\n';
  }
}

void write_snapshot_csv(const std::filesystem::path& path, const ParticleCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot_csv(out, cloud);
}

ParticleCloud read_snapshot_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("snapshot: missing header");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "color")
    throw InvalidArgument("snapshot: header must be x0,...,x{d-1},color");
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k)
    if (header[k] != "x" + std::to_string(k)) throw InvalidArgument("snapshot: unexpected column '" + header[k] + "'");

  std::vector<double> coords;
  std::vector<Color> colors;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != d + 1)
      throw InvalidArgument("snapshot line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1) +
                            " fields");
    try {
      for (std::size_t k = 0; k < d; ++k) coords.push_back(parse_double(fields[k]));
      if (fields[d].size() != 1) throw InvalidArgument("bad color '" + fields[d] + "'");
      colors.push_back(color_from_char(fields[d][0]));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("snapshot line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (colors.empty()) throw InvalidArgument("snapshot: no particles");
  Positions positions = Eigen::Map<const Positions>(coords.data(), static_cast<Eigen::Index>(d),
                                                    static_cast<Eigen::Index>(colors.size()));
  return ParticleCloud(std::move(positions), std::move(colors));
}

ParticleCloud read_snapshot_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_snapshot_csv(in);
}

}  // namespace bsvgd
