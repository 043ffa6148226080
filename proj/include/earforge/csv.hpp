#pragma once

// Plain-text exchange formats. Numbers are written in shortest round-trip form
// with '.' as decimal separator and LF line endings regardless of locale.

#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "earforge/doe.hpp"
#include "earforge/errors.hpp"
#include "earforge/geometry.hpp"
#include "earforge/modal.hpp"

namespace earforge::csv {

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw NumericError("cannot format number");
  return std::string(buf.data(), end);
}

inline double parse_number(std::string_view text, std::string_view where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(std::string(where) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\xEF' || s.front() == '\xBB' ||
                        s.front() == '\xBF')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

/// Non-empty lines of a file, CR stripped.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

inline constexpr std::string_view kContourHeader = "theta_rad,value_mm";
inline constexpr std::string_view kPointCloudHeader = "x_mm,y_mm,z_mm";
inline constexpr std::string_view kModalHeader = "mode,lambda_mm";

inline std::string contour_to_string(const UniformPolarSeries& series) {
  std::string out(kContourHeader);
  out += '\n';
  for (const auto& s : series.samples()) {
    out += format_number(s.theta);
    out += ',';
    out += format_number(s.value);
    out += '\n';
  }
  return out;
}

inline void write_contour(const std::filesystem::path& path, const UniformPolarSeries& series) {
  write_text(path, contour_to_string(series));
}

/// Rows of a `theta_rad,value_mm` file in file order, not validated for spacing.
inline std::vector<PolarSample> read_polar_samples(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || strip(lines.front()) != kContourHeader) {
    throw ValidationError("'" + path.string() + "': expected header '" + std::string(kContourHeader) + "'");
  }
  std::vector<PolarSample> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    const std::string where = path.filename().string() + " line " + std::to_string(i + 1);
    if (cells.size() != 2) throw ValidationError(where + ": expected 2 columns");
    out.push_back({parse_number(cells[0], where), parse_number(cells[1], where)});
  }
  return out;
}

struct Point3 {
  double x;
  double y;
  double z;
};

inline std::vector<Point3> read_point_cloud(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || strip(lines.front()) != kPointCloudHeader) {
    throw ValidationError("'" + path.string() + "': expected header '" + std::string(kPointCloudHeader) + "'");
  }
  std::vector<Point3> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    const std::string where = path.filename().string() + " line " + std::to_string(i + 1);
    if (cells.size() != 3) throw ValidationError(where + ": expected 3 columns");
    out.push_back({parse_number(cells[0], where), parse_number(cells[1], where), parse_number(cells[2], where)});
  }
  return out;
}

/// Header line of a file, for format sniffing.
inline std::string header_of(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  return lines.empty() ? std::string{} : strip(lines.front());
}

inline std::string modal_to_string(const ModalCoordinates& coords) {
  std::string out(kModalHeader);
  out += '\n';
  for (std::size_t i = 0; i < coords.lambda.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_number(coords.lambda[i]) + '\n';
  }
  out += "residue," + format_number(coords.residue) + '\n';
  return out;
}

inline ModalCoordinates modal_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ModalCoordinates out;
  bool header = false;
  bool residue = false;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != kModalHeader) throw ValidationError("expected header '" + std::string(kModalHeader) + "'");
      header = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 2) throw ValidationError("modal CSV: expected 2 columns in '" + line + "'");
    if (cells[0] == "residue") {
      out.residue = parse_number(cells[1], "modal CSV residue");
      residue = true;
    } else {
      const double mode = parse_number(cells[0], "modal CSV mode");
      if (mode != static_cast<double>(out.lambda.size() + 1)) throw ValidationError("modal CSV: modes out of order");
      out.lambda.push_back(parse_number(cells[1], "modal CSV lambda"));
    }
  }
  if (!header || !residue) throw ValidationError("modal CSV is missing its header or residue row");
  return out;
}

inline std::string design_to_string(const DesignMatrix& design, const FactorSpace& space) {
  std::string out = "run,role";
  for (const auto& f : space.factors) out += ',' + f.name;
  out += '\n';
  for (std::size_t r = 0; r < design.size(); ++r) {
    out += std::to_string(r + 1) + ',' + std::string(to_string(design.points[r].role));
    for (double v : to_physical(space, design.points[r].coords)) out += ',' + format_number(v);
    out += '\n';
  }
  return out;
}

}  // namespace earforge::csv
