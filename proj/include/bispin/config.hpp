#ifndef BISPIN_CONFIG_HPP
#define BISPIN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bispin/cce.hpp"
#include "bispin/spin_core.hpp"

namespace bispin {

enum class KeyType { real, integer, boolean, text, real_list };

struct ConfigKey {
  std::string path;  // "section.key"
  KeyType type;
  std::string default_value;
  std::string help;
};

/// Every recognised key with its default, in print order.
const std::vector<ConfigKey>& config_schema();

/// Flat sectioned key-value configuration. Unknown keys and malformed values
/// raise UsageError naming the key path.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_text(std::string_view text, const std::string& source = "<config>");
  static RunConfig from_file(const std::filesystem::path& path);

  void set(const std::string& path, const std::string& value);
  /// "section.key=value"
  void set_assignment(const std::string& assignment);

  const std::string& raw(const std::string& path) const;
  double real(const std::string& path) const;
  std::int64_t integer(const std::string& path) const;
  bool boolean(const std::string& path) const;
  const std::string& text(const std::string& path) const { return raw(path); }
  std::vector<double> real_list(const std::string& path) const;

  /// INI text listing every key, round-trips through from_text.
  std::string to_text(bool with_help = true) const;
  nlohmann::json to_json() const;

  SpinSystem spin_system() const;
  CceParams cce_params() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace bispin

#endif  // BISPIN_CONFIG_HPP
