#include "irm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace irm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: missing '=' on line " +
                               std::to_string(lineno));
    }
    cfg.values_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return cfg;
}

void Config::set(const std::string& key, double value) {
  values_[key] = std::to_string(value);
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.contains(key); }

std::optional<double> Config::get_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return std::stod(it->second);
}

std::optional<std::string> Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double Config::require_double(const std::string& key,
                              const std::vector<std::string>& required) const {
  if (const auto v = get_double(key)) return *v;
  std::string msg = "config: missing key '" + key + "'";
  std::string missing;
  for (const auto& k : required) {
    if (!has(k)) missing += (missing.empty() ? "" : ", ") + k;
  }
  if (!missing.empty()) msg += " (required keys: " + missing + ")";
  throw std::runtime_error(msg);
}

}  // namespace irm
