#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qclt/harness/config.hpp"

namespace qclt::harness {

using ojson = nlohmann::ordered_json;

struct QResult {
  std::uint64_t q = 0;
  /// Set when the modulus failed; the run continues with the next q.
  std::optional<std::string> error;
  ojson summary = ojson::object();
  /// One object per character statistic; each carries "chi_index".
  std::vector<ojson> rows;

  bool operator==(const QResult&) const = default;
};

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<ojson>> rows;
};

enum class PlotKind { histogram, qq, trend };

struct PlotSpec {
  std::string name;
  PlotKind kind = PlotKind::histogram;
  std::string title;
  std::string xLabel;
  std::string yLabel;
  /// histogram/qq: normalized samples. trend: x values.
  std::vector<double> x;
  /// trend: y values.
  std::vector<double> y;
};

struct RunRecord {
  ojson config;
  std::string experiment;
  std::string version = kVersion;
  double wallSeconds = 0.0;
  std::vector<QResult> results;
  std::vector<CsvTable> tables;
  std::vector<PlotSpec> plots;

  CsvTable& table(const std::string& name) {
    for (auto& t : tables) {
      if (t.name == name) return t;
    }
    throw std::out_of_range("no table " + name);
  }

  bool any_failed() const {
    for (const auto& r : results) {
      if (r.error) return true;
    }
    return false;
  }

  /// Everything that reruns must reproduce (wall time excluded).
  ojson payload() const {
    ojson j;
    j["schema"] = kSchema;
    j["version"] = version;
    j["experiment"] = experiment;
    j["config"] = config;
    ojson rs = ojson::array();
    for (const auto& r : results) {
      ojson e;
      e["q"] = r.q;
      e["error"] = r.error ? ojson(*r.error) : ojson(nullptr);
      e["summary"] = r.summary;
      e["rows"] = r.rows;
      rs.push_back(std::move(e));
    }
    j["results"] = std::move(rs);
    return j;
  }
};

/// JSONL lines: a config line, then per q a summary (or error) line followed
/// by one line per character row.
inline std::vector<std::string> jsonl_lines(const RunRecord& rec) {
  std::vector<std::string> lines;
  ojson head;
  head["schema"] = kSchema;
  head["experiment"] = rec.experiment;
  head["kind"] = "config";
  head["version"] = rec.version;
  head["config"] = rec.config;
  lines.push_back(head.dump());
  for (const auto& r : rec.results) {
    ojson s;
    s["schema"] = kSchema;
    s["experiment"] = rec.experiment;
    s["q"] = r.q;
    s["chi_index"] = nullptr;
    if (r.error) {
      s["kind"] = "error";
      s["error"] = *r.error;
    } else {
      s["kind"] = "summary";
    }
    s["summary"] = r.summary;
    lines.push_back(s.dump());
    for (const auto& row : r.rows) {
      ojson l;
      l["schema"] = kSchema;
      l["experiment"] = rec.experiment;
      l["q"] = r.q;
      l["chi_index"] = row.at("chi_index");
      l["kind"] = "row";
      for (const auto& [k, v] : row.items()) {
        if (k != "chi_index") l[k] = v;
      }
      lines.push_back(l.dump());
    }
  }
  return lines;
}

/// Rebuilds the payload part of a record from JSONL lines.
inline RunRecord record_from_jsonl(const std::vector<std::string>& lines) {
  RunRecord rec;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    const ojson j = ojson::parse(line);
    if (j.at("schema") != kSchema) throw std::runtime_error("unexpected schema " + j.at("schema").dump());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "config") {
      rec.experiment = j.at("experiment").get<std::string>();
      rec.version = j.at("version").get<std::string>();
      rec.config = j.at("config");
    } else if (kind == "summary" || kind == "error") {
      QResult r;
      r.q = j.at("q").get<std::uint64_t>();
      if (kind == "error") r.error = j.at("error").get<std::string>();
      r.summary = j.at("summary");
      rec.results.push_back(std::move(r));
    } else if (kind == "row") {
      if (rec.results.empty() || rec.results.back().q != j.at("q").get<std::uint64_t>()) {
        throw std::runtime_error("row line without preceding summary");
      }
      ojson row;
      row["chi_index"] = j.at("chi_index");
      for (const auto& [k, v] : j.items()) {
        if (k != "schema" && k != "experiment" && k != "q" && k != "chi_index" && k != "kind") row[k] = v;
      }
      rec.results.back().rows.push_back(std::move(row));
    } else {
      throw std::runtime_error("unknown line kind " + kind);
    }
  }
  return rec;
}

}  // namespace qclt::harness
