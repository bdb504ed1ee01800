#pragma once

#include "bsvgd/core.hpp"

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bsvgd {

/// Config problem tied to a source line (0 when not attributable to one).
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, double, std::string, Array> data;
  /// Original spelling of a number, kept so large integers parse exactly.
  std::string number_text;
  int line = 0;
};

/// Flat key/value view of a TOML-style run config.
///
/// Supported syntax: `[section]` headers, `key = value` with dotted keys,
/// `#` comments, numbers, booleans, quoted or bare-word strings, and (nested,
/// possibly multi-line) arrays. Keys are stored fully qualified, e.g.
/// `svgd.schedule.kind`.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, std::string source = "<config>");

  const std::string& source() const noexcept { return source_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const ConfigValue* find(const std::string& key) const;
  const std::map<std::string, ConfigValue>& values() const noexcept { return values_; }

  /// Parses `value_text` as a config value and stores it under `key` (overriding).
  void set(const std::string& key, std::string_view value_text, const std::string& origin = "override");
  /// Keys of `other` replace keys here.
  void merge(const ConfigDocument& other);

  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double fallback) const;
  long get_integer(const std::string& key) const;
  long get_integer(const std::string& key, long fallback) const;
  std::uint64_t get_unsigned(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_number_list(const std::string& key) const;
  std::vector<std::vector<double>> get_matrix(const std::string& key) const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const ConfigValue& require(const std::string& key) const;

  std::string source_;
  std::map<std::string, ConfigValue> values_;
  std::map<std::string, std::string> origins_;
};

}  // namespace bsvgd
