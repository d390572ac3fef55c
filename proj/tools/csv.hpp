#pragma once
// Locale-independent CSV with 17 significant digits per value.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace bouss::cli {

/// Shortest text for v that keeps 17 significant digits.
std::string format_number(double v);

class CsvWriter {
 public:
  /// Throws std::runtime_error if the file cannot be created.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(const std::string& v);
  /// Terminates the current row.
  void end_row();

 private:
  void sep();

  std::ofstream out_;
  bool fresh_ = true;
};

/// Numeric columns keyed by header name. Throws ConfigError on malformed input.
std::map<std::string, std::vector<double>> read_csv(const std::filesystem::path& path);

}  // namespace bouss::cli
