#ifndef BISPIN_IO_HPP
#define BISPIN_IO_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace bispin {

/// Bad input from the user (config, columns, files): exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Always 17 significant digits (binary round-trip), locale independent.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> comments;  // '#' lines without the marker
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
  /// Column by name; UsageError naming the missing column.
  Eigen::VectorXd column(std::string_view name) const;
  void add_row(std::span<const double> values);
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text, const std::string& source = "<string>");
CsvTable read_csv(const std::filesystem::path& path);

/// Writes through a temporary file and renames, so readers never see partial output.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);
/// SHA-256 over "blob <size>\0" + content, the git object framing.
std::string blob_checksum(std::string_view content);

std::string dump_json(const nlohmann::json& j);

}  // namespace bispin

#endif  // BISPIN_IO_HPP
