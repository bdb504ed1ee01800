#include "bsvgd/config.hpp"

#include "bsvgd/snapshot_io.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace bsvgd {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : InvalidArgument(line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      line_(line) {}

namespace {

class ValueParser {
 public:
  ValueParser(std::string_view text, std::string source, int line)
      : text_(text), source_(std::move(source)), line_(line) {}

  ConfigValue parse_all() {
    ConfigValue v = parse_value();
    skip_space();
    if (pos_ != text_.size()) error("unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const { throw ConfigError(source_, line_, msg); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  ConfigValue parse_value() {
    skip_space();
    if (pos_ >= text_.size()) error("missing value");
    const char c = text_[pos_];
    if (c == '[') return parse_array();
    if (c == '"' || c == '\'') return parse_string(c);
    return parse_scalar();
  }

  ConfigValue parse_array() {
    ++pos_;
    ConfigValue::Array items;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return make(std::move(items));
    }
    while (true) {
      items.push_back(parse_value());
      skip_space();
      if (pos_ >= text_.size()) error("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          break;
        }
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        break;
      }
      error("expected ',' or ']' in array");
    }
    return make(std::move(items));
  }

  ConfigValue parse_string(char quote) {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      if (text_[pos_] == '\\' && quote == '"' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) error("unterminated string");
    ++pos_;
    return make(std::move(out));
  }

  ConfigValue parse_scalar() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    const std::string word(text_.substr(start, pos_ - start));
    if (word.empty()) error("missing value");
    if (word == "true") return make(true);
    if (word == "false") return make(false);
    const char first = word.front();
    if (std::isdigit(static_cast<unsigned char>(first)) || first == '-' || first == '+' || first == '.') {
      std::string cleaned;
      for (char ch : word)
        if (ch != '_') cleaned.push_back(ch);
      try {
        ConfigValue v = make(parse_double(cleaned));
        v.number_text = cleaned;
        return v;
      } catch (const InvalidArgument&) {
        error("malformed number '" + word + "'");
      }
    }
    for (char ch : word)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
        error("unquoted value '" + word + "' contains '" + std::string(1, ch) + "'");
    return make(word);
  }

  template <typename T>
  ConfigValue make(T&& value) const {
    ConfigValue v;
    v.data = std::forward<T>(value);
    v.line = line_;
    return v;
  }

  std::string_view text_;
  std::string source_;
  int line_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    if (c == '.' && i + 1 < key.size() && key[i + 1] == '.') return false;
  }
  return true;
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  char quote = 0;
  for (char c : s) {
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

const char* type_name(const ConfigValue& v) {
  switch (v.data.index()) {
    case 0:
      return "boolean";
    case 1:
      return "number";
    case 2:
      return "string";
    default:
      return "array";
  }
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
  std::vector<std::string> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    lines.push_back(strip_comment(text.substr(pos, eol - pos)));
    pos = eol + 1;
  }

  ConfigDocument doc;
  doc.source_ = source;
  std::string section;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string_view body = trim(lines[i]);
    if (body.empty()) continue;

    if (body.front() == '[' && body.find('=') == std::string_view::npos) {
      if (body.back() != ']' || body.size() < 3) throw ConfigError(source, line_no, "malformed section header");
      const std::string_view name = trim(body.substr(1, body.size() - 2));
      if (!valid_key(name)) throw ConfigError(source, line_no, "invalid section name '" + std::string(name) + "'");
      section = std::string(name);
      continue;
    }

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string_view key = trim(body.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(source, line_no, "invalid key '" + std::string(key) + "'");
    std::string value_text(trim(body.substr(eq + 1)));
    // arrays may continue over several lines
    while (bracket_balance(value_text) > 0 && i + 1 < lines.size()) value_text += ' ' + lines[++i];

    const std::string full_key = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.values_.count(full_key)) throw ConfigError(source, line_no, "duplicate key '" + full_key + "'");
    doc.values_[full_key] = ValueParser(value_text, source, line_no).parse_all();
    doc.origins_[full_key] = source;
  }
  return doc;
}

const ConfigValue* ConfigDocument::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

void ConfigDocument::set(const std::string& key, std::string_view value_text, const std::string& origin) {
  if (!valid_key(key)) throw ConfigError(origin, 0, "invalid key '" + key + "'");
  values_[key] = ValueParser(trim(value_text), origin, 0).parse_all();
  origins_[key] = origin;
}

void ConfigDocument::merge(const ConfigDocument& other) {
  for (const auto& [k, v] : other.values_) {
    values_[k] = v;
    origins_[k] = other.origins_.at(k);
  }
}

void ConfigDocument::fail(const std::string& key, const std::string& message) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_, 0, key + ": " + message);
  throw ConfigError(origins_.at(key), it->second.line, key + ": " + message);
}

const ConfigValue& ConfigDocument::require(const std::string& key) const {
  const auto* v = find(key);
  if (!v) throw ConfigError(source_, 0, "missing required key '" + key + "'");
  return *v;
}

double ConfigDocument::get_number(const std::string& key) const {
  const auto& v = require(key);
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  fail(key, std::string("expected a number, found a ") + type_name(v));
}

double ConfigDocument::get_number(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

long ConfigDocument::get_integer(const std::string& key) const {
  const double d = get_number(key);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) fail(key, "expected an integer");
  return static_cast<long>(d);
}

long ConfigDocument::get_integer(const std::string& key, long fallback) const {
  return has(key) ? get_integer(key) : fallback;
}

std::uint64_t ConfigDocument::get_unsigned(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const auto& v = require(key);
  if (!std::holds_alternative<double>(v.data)) fail(key, "expected a non-negative integer");
  const std::string& text = v.number_text;
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    fail(key, "expected a non-negative integer");
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(text, &used);
    return static_cast<std::uint64_t>(value);
  } catch (const std::exception&) {
    fail(key, "integer out of range");
  }
}

bool ConfigDocument::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = require(key);
  if (const auto* b = std::get_if<bool>(&v.data)) return *b;
  fail(key, std::string("expected true or false, found a ") + type_name(v));
}

std::string ConfigDocument::get_string(const std::string& key) const {
  const auto& v = require(key);
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  fail(key, std::string("expected a string, found a ") + type_name(v));
}

std::string ConfigDocument::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<double> ConfigDocument::get_number_list(const std::string& key) const {
  const auto& v = require(key);
  const auto* arr = std::get_if<ConfigValue::Array>(&v.data);
  if (!arr) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& item : *arr) {
    const auto* d = std::get_if<double>(&item.data);
    if (!d) fail(key, "expected an array of numbers");
    out.push_back(*d);
  }
  return out;
}

std::vector<std::vector<double>> ConfigDocument::get_matrix(const std::string& key) const {
  const auto& v = require(key);
  const auto* arr = std::get_if<ConfigValue::Array>(&v.data);
  if (!arr) fail(key, "expected an array of arrays of numbers");
  std::vector<std::vector<double>> out;
  for (const auto& row : *arr) {
    const auto* r = std::get_if<ConfigValue::Array>(&row.data);
    if (!r) fail(key, "expected an array of arrays of numbers");
    std::vector<double> values;
    for (const auto& item : *r) {
      const auto* d = std::get_if<double>(&item.data);
      if (!d) fail(key, "expected an array of arrays of numbers");
      values.push_back(*d);
    }
    out.push_back(std::move(values));
  }
  return out;
}

}  // namespace bsvgd
