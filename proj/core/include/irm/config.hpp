#ifndef IRMESH_CONFIG_HPP_
#define IRMESH_CONFIG_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace irm {

/// Flat key=value configuration. Lines starting with '#' are comments.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, double value);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::string> get_string(const std::string& key) const;

  /// Value of a required key; throws std::runtime_error naming every
  /// missing key from `required` when absent.
  double require_double(const std::string& key,
                        const std::vector<std::string>& required = {}) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace irm

#endif  // IRMESH_CONFIG_HPP_
