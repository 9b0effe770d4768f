#pragma once

#include "freqlab/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace freqlab::app {

enum class ValueType { String, Int, Double, Bool, List, Points };

struct SchemaEntry {
  std::string key;
  ValueType type;
  std::string fallback;  // default, as written in a config file
  std::string help;
};

const std::vector<SchemaEntry>& schema();
std::string schema_text();
const std::vector<std::string>& experiment_names();

// Flat `key = value` text; `[section]` lines prefix the following keys with `section.`.
// Unknown keys and malformed values raise ErrorKind::Config.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<text>");
  static Config load(const std::string& path);
  // Defaults of the named experiment.
  static Config builtin(const std::string& experiment);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key) const;
  int integer(const std::string& key) const;
  double number(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  std::vector<Vec> points(const std::string& key) const;

  const std::string& origin() const { return origin_; }
  // Explicitly set keys, sorted; used for the run header.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const SchemaEntry& entry(const std::string& key) const;
  std::string raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace freqlab::app
