#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qclt/harness/cache.hpp"
#include "qclt/harness/record.hpp"
#include "qclt/harness/svg.hpp"

namespace qclt::harness {

inline std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_number()) return v.dump();
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

inline std::string render_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

/// Writes the requested formats under outDir and returns the paths, in a
/// fixed order: CSV tables, the JSONL file, SVG plots.
inline std::vector<std::filesystem::path> emit_outputs(const RunRecord& rec, const std::set<Format>& formats,
                                                       const std::filesystem::path& outDir) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec || !std::filesystem::is_directory(outDir)) {
    throw IoError("cannot create output directory " + outDir.string() + (ec ? ": " + ec.message() : ""));
  }
  std::vector<std::filesystem::path> paths;
  if (formats.contains(Format::csv)) {
    for (const auto& t : rec.tables) {
      paths.push_back(outDir / (t.name + ".csv"));
      detail::write_file(paths.back(), render_csv(t));
    }
  }
  if (formats.contains(Format::jsonl)) {
    std::string body;
    for (const auto& line : jsonl_lines(rec)) body += line + '\n';
    paths.push_back(outDir / (rec.experiment + ".jsonl"));
    detail::write_file(paths.back(), body);
  }
  if (formats.contains(Format::svg)) {
    for (const auto& p : rec.plots) {
      paths.push_back(outDir / (p.name + ".svg"));
      detail::write_file(paths.back(), render_svg(p));
    }
  }
  return paths;
}

inline RunRecord read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return record_from_jsonl(lines);
}

}  // namespace qclt::harness
