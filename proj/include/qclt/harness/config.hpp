#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qclt/characters.hpp"
#include "qclt/lfunc.hpp"
#include "qclt/mollifier.hpp"
#include "qclt/stats.hpp"

namespace qclt::harness {

inline constexpr const char* kVersion = "qclt 0.1.0";
inline constexpr const char* kSchema = "qclt/1";

enum class Experiment { theorem1, prop1, prop2, prop3, prop4, prop4_smoothed, lemma1 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::theorem1:
      return "theorem1";
    case Experiment::prop1:
      return "prop1";
    case Experiment::prop2:
      return "prop2";
    case Experiment::prop3:
      return "prop3";
    case Experiment::prop4:
      return "prop4";
    case Experiment::prop4_smoothed:
      return "prop4_smoothed";
    case Experiment::lemma1:
      return "lemma1";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (Experiment e : {Experiment::theorem1, Experiment::prop1, Experiment::prop2, Experiment::prop3,
                       Experiment::prop4, Experiment::prop4_smoothed, Experiment::lemma1}) {
    if (s == to_string(e)) return e;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

inline LMethod parse_method(const std::string& s) {
  if (s == "truncated") return LMethod::truncated;
  if (s == "smoothed") return LMethod::smoothed;
  throw ConfigError("unknown method '" + s + "' (truncated|smoothed)");
}

inline Family parse_family(const std::string& s) {
  if (s == "all") return Family::all;
  if (s == "primitive") return Family::primitive;
  throw ConfigError("unknown family '" + s + "' (all|primitive)");
}

inline const char* to_string(Family f) { return f == Family::all ? "all" : "primitive"; }

inline Normalization parse_normalization(const std::string& s) {
  if (s == "paper" || s == "paper_scale") return Normalization::paper_scale;
  if (s == "empirical" || s == "empirical_scale") return Normalization::empirical_scale;
  throw ConfigError("unknown normalization '" + s + "' (paper|empirical)");
}

/// Overrides applied on top of DeskParams::defaults(q).
struct DeskOverrides {
  std::optional<double> t;
  std::optional<double> W;
  std::optional<std::uint64_t> X;
  std::optional<std::uint64_t> Y;
  std::optional<std::uint64_t> K1;
  std::optional<std::uint64_t> K2;
  std::optional<std::uint64_t> truncK1;
  std::optional<std::uint64_t> truncK2;
  std::optional<std::uint64_t> supportCap;
};

/// Compact bump (1 - (t/cT)^2)^3 on [-cT, cT].
struct SmoothWindow {
  double T = 4.0;
  double c = 1.0;
  /// Minimum quadrature node count; rounded up to whole panels.
  std::uint64_t nodes = 64;

  double half_width() const { return c * T; }
  double weight(double u) const {
    const double x = u / half_width();
    if (std::abs(x) >= 1.0) return 0.0;
    const double y = 1.0 - x * x;
    return y * y * y;
  }
  /// Integral of the bump over the real line.
  double integral() const { return 32.0 / 35.0 * half_width(); }

  void validate() const {
    if (!(T > 0.0) || !(c > 0.0)) throw ConfigError("window: T and c must be positive");
    if (nodes < 64) throw ConfigError("window: at least 64 quadrature nodes required");
  }
};

enum class Format { csv, jsonl, svg };

inline const char* to_string(Format f) {
  switch (f) {
    case Format::csv:
      return "csv";
    case Format::jsonl:
      return "jsonl";
    default:
      return "svg";
  }
}

struct ExperimentConfig {
  Experiment experiment = Experiment::theorem1;
  std::vector<std::uint64_t> qList{1009, 10007, 100003};
  Family family = Family::primitive;
  DeskOverrides desk;
  /// Unset: smoothed, except prop4 which defaults to truncated.
  std::optional<LMethod> method;
  double floor = 1e-8;
  Normalization normalization = Normalization::empirical_scale;
  std::string outDir = "qclt-out";
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> maxChars;
  std::set<Format> formats{Format::csv, Format::jsonl, Format::svg};
  /// prop1 grid; empty means eight equally spaced points in (1/2, 1/2 + 10/log q].
  std::vector<double> sigmaGrid;
  SmoothWindow window;
  /// prop4 / prop4_smoothed self-test: L and M replaced by 1.
  bool stub = false;
  std::string cacheDir;

  LMethod effective_method() const {
    if (method) return *method;
    return experiment == Experiment::prop4 ? LMethod::truncated : LMethod::smoothed;
  }

  void validate() const {
    if (qList.empty()) throw ConfigError("qList must be nonempty");
    for (std::uint64_t q : qList) {
      if (q < 3) throw ConfigError("every q must be >= 3 (got " + std::to_string(q) + ")");
    }
    if (!(floor > 0.0)) throw ConfigError("floor must be positive");
    if (maxChars && *maxChars < 1) throw ConfigError("max-chars must be >= 1");
    for (double s : sigmaGrid) {
      if (!(s > 0.5)) throw ConfigError("sigma grid points must exceed 1/2");
    }
    if (desk.X && desk.Y && *desk.Y > *desk.X) throw ConfigError("need Y <= X");
    if (desk.truncK1 && *desk.truncK1 < 1) throw ConfigError("truncation lengths must be >= 1");
    if (desk.truncK2 && *desk.truncK2 < 1) throw ConfigError("truncation lengths must be >= 1");
    if (desk.supportCap && *desk.supportCap < 1) throw ConfigError("support cap must be >= 1");
    window.validate();
  }

  /// Defaults for q with overrides applied. An overridden X below the
  /// default Y pulls Y down with it.
  DeskParams desk_params(std::uint64_t q) const {
    DeskParams p = DeskParams::defaults(q, desk.t.value_or(0.0));
    if (desk.W) p.set_W(*desk.W);
    if (desk.X) p.X = *desk.X;
    if (desk.Y) {
      p.Y = *desk.Y;
    } else {
      p.Y = std::min(p.Y, p.X);
    }
    if (desk.K1) p.K1 = *desk.K1;
    if (desk.K2) p.K2 = *desk.K2;
    if (desk.truncK1) p.truncK1 = *desk.truncK1;
    if (desk.truncK2) p.truncK2 = *desk.truncK2;
    if (desk.supportCap) p.supportCap = *desk.supportCap;
    if (p.Y > p.X) throw ConfigError("q=" + std::to_string(q) + ": Y exceeds X");
    return p;
  }
};

namespace detail {

template <class T>
void put_opt(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get_opt(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["qList"] = c.qList;
  j["family"] = to_string(c.family);
  nlohmann::ordered_json d = nlohmann::ordered_json::object();
  detail::put_opt(d, "t", c.desk.t);
  detail::put_opt(d, "W", c.desk.W);
  detail::put_opt(d, "X", c.desk.X);
  detail::put_opt(d, "Y", c.desk.Y);
  detail::put_opt(d, "K1", c.desk.K1);
  detail::put_opt(d, "K2", c.desk.K2);
  detail::put_opt(d, "truncK1", c.desk.truncK1);
  detail::put_opt(d, "truncK2", c.desk.truncK2);
  detail::put_opt(d, "supportCap", c.desk.supportCap);
  j["desk"] = d;
  j["method"] = to_string(c.effective_method());
  j["floor"] = c.floor;
  j["normalization"] = to_string(c.normalization);
  j["outDir"] = c.outDir;
  j["seed"] = c.seed;
  if (c.maxChars) {
    j["maxChars"] = *c.maxChars;
  } else {
    j["maxChars"] = nullptr;
  }
  std::vector<std::string> formats;
  for (Format f : c.formats) formats.emplace_back(to_string(f));
  j["formats"] = formats;
  j["sigmaGrid"] = c.sigmaGrid;
  j["window"] = {{"T", c.window.T}, {"c", c.window.c}, {"nodes", c.window.nodes}};
  j["stub"] = c.stub;
  j["cacheDir"] = c.cacheDir;
  return j;
}

inline std::set<Format> parse_formats(const std::vector<std::string>& names) {
  std::set<Format> out;
  for (const auto& n : names) {
    if (n == "csv") {
      out.insert(Format::csv);
    } else if (n == "jsonl") {
      out.insert(Format::jsonl);
    } else if (n == "svg") {
      out.insert(Format::svg);
    } else {
      throw ConfigError("unknown format '" + n + "'");
    }
  }
  return out;
}

/// Applies the keys present in `j` to `c`; absent keys leave `c` unchanged.
inline void apply_json(const nlohmann::json& j, ExperimentConfig& c) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("qList")) c.qList = j.at("qList").get<std::vector<std::uint64_t>>();
    if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("desk")) {
      const auto& d = j.at("desk");
      detail::get_opt(d, "t", c.desk.t);
      detail::get_opt(d, "W", c.desk.W);
      detail::get_opt(d, "X", c.desk.X);
      detail::get_opt(d, "Y", c.desk.Y);
      detail::get_opt(d, "K1", c.desk.K1);
      detail::get_opt(d, "K2", c.desk.K2);
      detail::get_opt(d, "truncK1", c.desk.truncK1);
      detail::get_opt(d, "truncK2", c.desk.truncK2);
      detail::get_opt(d, "supportCap", c.desk.supportCap);
    }
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("floor")) c.floor = j.at("floor").get<double>();
    if (j.contains("normalization")) c.normalization = parse_normalization(j.at("normalization").get<std::string>());
    if (j.contains("outDir")) c.outDir = j.at("outDir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("maxChars")) {
      c.maxChars.reset();
      detail::get_opt(j, "maxChars", c.maxChars);
    }
    if (j.contains("formats")) c.formats = parse_formats(j.at("formats").get<std::vector<std::string>>());
    if (j.contains("sigmaGrid")) c.sigmaGrid = j.at("sigmaGrid").get<std::vector<double>>();
    if (j.contains("window")) {
      const auto& w = j.at("window");
      if (w.contains("T")) c.window.T = w.at("T").get<double>();
      if (w.contains("c")) c.window.c = w.at("c").get<double>();
      if (w.contains("nodes")) c.window.nodes = w.at("nodes").get<std::uint64_t>();
    }
    if (j.contains("stub")) c.stub = j.at("stub").get<bool>();
    if (j.contains("cacheDir")) c.cacheDir = j.at("cacheDir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  apply_json(j, c);
  c.validate();
  return c;
}

}  // namespace qclt::harness
