// config.hpp - flat key = value configuration files.
//
//   # comment
//   window = 5
//   endpoint.url = http://localhost:8080/v1/complete
//
// Keys are case-sensitive; surrounding whitespace is trimmed; a value may
// be wrapped in double quotes to keep leading or trailing spaces.  Later
// assignments override earlier ones.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace planverify {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigFile {
 public:
  ConfigFile() = default;

  /// Throws ConfigError on a line without '=' or an empty key.
  static ConfigFile parse(std::string_view text, const std::string& source = "<config>");
  static ConfigFile load(const std::string& path);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  void set(std::string key, std::string value);

  /// Typed getters; throw ConfigError when the value does not parse.
  std::optional<long long> get_int(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  /// Comma-separated list, items trimmed, empty items dropped.
  std::optional<std::vector<std::string>> get_list(std::string_view key) const;

  /// Throws ConfigError naming the first key not in `known`.
  void require_known(const std::set<std::string, std::less<>>& known) const;

  const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

 private:
  std::string source_ = "<config>";
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace planverify
