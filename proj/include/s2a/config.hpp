#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s2a/error.hpp"

namespace s2a {

// Flat key=value run configuration. Every key has a schema entry with a
// default; unknown keys are rejected on sight, whether they come from a
// file or a command-line override.
class RunConfig {
 public:
  RunConfig();  // all defaults

  static RunConfig from_file(const std::string& path);

  // `key=value` as accepted on the command line.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // Cross-key validation of the fully merged configuration.
  void validate() const;

  // Canonical "key = value" text, schema order; written next to run outputs
  // so a run can be reproduced from its directory alone.
  std::string snapshot() const;

  // Deterministic identifier for file names and CSV rows, derived from the
  // task, condition, flags and seed unless run_id is set explicitly.
  std::string run_id() const;

 private:
  struct Entry {
    std::string key;
    std::string value;
  };
  Entry* find(const std::string& key);
  const Entry* find(const std::string& key) const;
  std::vector<Entry> entries_;
};

// Comma-separated list helper for range-valued keys; items are trimmed and
// empties dropped.
std::vector<std::string> parse_csv_list(const std::string& text);

}  // namespace s2a
