#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

#include "qclt/lfunc.hpp"

namespace qclt::harness {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Family L-values keyed by (q, method, sigma, t), in memory and optionally on
/// disk. Disk entries hold doubles in hex-float form so reloads are exact.
class LValueCache {
 public:
  LValueCache() = default;
  explicit LValueCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::shared_ptr<const FamilyLValues> get(const CharacterGroup& group, const GroupInfo& info, ComplexPoint s,
                                           LMethod method) {
    const Key key{group.modulus(), method, s.sigma, s.t};
    {
      std::shared_lock lock(mutex_);
      if (auto it = memory_.find(key); it != memory_.end()) {
        ++hits_;
        return it->second;
      }
    }
    std::shared_ptr<const FamilyLValues> value;
    if (!dir_.empty()) value = load(key);
    if (value) {
      ++diskHits_;
    } else {
      value = std::make_shared<const FamilyLValues>(batch_L_values(s, group, method, info));
      ++misses_;
      if (!dir_.empty()) store(key, *value);
    }
    std::unique_lock lock(mutex_);
    return memory_.emplace(key, value).first->second;
  }

  void clear_memory() {
    std::unique_lock lock(mutex_);
    memory_.clear();
  }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t disk_hits() const { return diskHits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  using Key = std::tuple<std::uint64_t, LMethod, double, double>;

  static std::string hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
  }

  static double unhex(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

  std::filesystem::path path_for(const Key& k) const {
    const auto& [q, method, sigma, t] = k;
    std::string name = "L_" + std::to_string(q) + "_" + to_string(method) + "_" + hex(sigma) + "_" + hex(t) + ".json";
    return dir_ / name;
  }

  std::shared_ptr<const FamilyLValues> load(const Key& k) const {
    std::ifstream in(path_for(k));
    if (!in) return nullptr;
    try {
      const auto j = nlohmann::json::parse(in);
      auto v = std::make_shared<FamilyLValues>();
      v->s = {unhex(j.at("sigma")), unhex(j.at("t"))};
      v->method = std::get<1>(k);
      v->errEstimate = unhex(j.at("err"));
      for (const auto& e : j.at("values")) {
        if (e.is_null()) {
          v->values.emplace_back();
          v->available.push_back(false);
        } else {
          v->values.emplace_back(unhex(e.at(0)), unhex(e.at(1)));
          v->available.push_back(true);
        }
      }
      return v;
    } catch (const nlohmann::json::exception&) {
      return nullptr;
    }
  }

  void store(const Key& k, const FamilyLValues& v) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    nlohmann::json j;
    j["sigma"] = hex(v.s.sigma);
    j["t"] = hex(v.s.t);
    j["err"] = hex(v.errEstimate);
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      if (v.available[i]) {
        values.push_back({hex(v.values[i].real()), hex(v.values[i].imag())});
      } else {
        values.push_back(nullptr);
      }
    }
    j["values"] = std::move(values);
    const auto path = path_for(k);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write cache file " + path.string());
    out << j.dump();
    if (!out) throw IoError("write failed for cache file " + path.string());
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const FamilyLValues>> memory_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> diskHits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

}  // namespace qclt::harness
