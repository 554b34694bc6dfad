#pragma once

#include "hypertopic/rank_select.hpp"
#include "hypertopic/solver.hpp"
#include "hypertopic/synthgen.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>

namespace hypertopic {

/// Flat `key=value` settings; '#' starts a comment line.
class ConfigMap {
 public:
  static ConfigMap parse(std::istream& in, const std::string& source = "<config>");
  static ConfigMap load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool contains(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Throws ConfigInvalid for keys outside `known`.
  void check_keys(const std::set<std::string>& known) const;

  /// Sorted `key=value` lines.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

const std::set<std::string>& solver_keys();
const std::set<std::string>& synth_keys();
const std::set<std::string>& rank_keys();

/// Values missing from the map keep the struct defaults.
SolverConfig solver_config_from(const ConfigMap& map);
SynthConfig synth_config_from(const ConfigMap& map);
RankSelectConfig rank_config_from(const ConfigMap& map);

}  // namespace hypertopic
