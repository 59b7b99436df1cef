// Deterministic text output: CSV tables with a reproducibility header and
// plain key=value manifests. No timestamps anywhere, so repeated runs with
// the same seed are byte-identical.
#pragma once

#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rmtlab {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

class CsvWriter {
 public:
  // Opens path and writes "# <tool_line>" as the first line. The tool line
  // should carry the tool name, version, and full parameter set.
  CsvWriter(const std::string& path, const std::string& tool_line);

  void comment(const std::string& text);
  void header(std::span<const std::string> columns);
  void header(std::initializer_list<std::string> columns);
  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);
  // For rows mixing text and numbers; fields are written verbatim.
  void raw_row(std::span<const std::string> fields);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

class KeyValueWriter {
 public:
  explicit KeyValueWriter(const std::string& path);

  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, double value);
  void put(const std::string& key, long long value);

 private:
  std::ofstream out_;
};

}  // namespace rmtlab
