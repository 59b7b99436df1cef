#include "rmtlab/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace rmtlab {

std::string format_double(double v) {
  // %.17g always round-trips; trim to the shortest form that still does.
  char buf[48];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v || (back != back && v != v)) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& tool_line)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  out_ << "# " << tool_line << "\n";
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(std::span<const std::string> columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ",";
    out_ << columns[i];
  }
  out_ << "\n";
}

void CsvWriter::header(std::initializer_list<std::string> columns) {
  header(std::span<const std::string>(columns.begin(), columns.size()));
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ",";
    out_ << format_double(values[i]);
  }
  out_ << "\n";
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::raw_row(std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ",";
    out_ << fields[i];
  }
  out_ << "\n";
}

KeyValueWriter::KeyValueWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void KeyValueWriter::put(const std::string& key, const std::string& value) {
  out_ << key << " = " << value << "\n";
}

void KeyValueWriter::put(const std::string& key, double value) {
  out_ << key << " = " << format_double(value) << "\n";
}

void KeyValueWriter::put(const std::string& key, long long value) {
  out_ << key << " = " << value << "\n";
}

}  // namespace rmtlab
