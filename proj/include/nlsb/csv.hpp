#pragma once

#include <string>
#include <vector>

namespace nlsb {

/// Fixed-column CSV table. Numbers use 17 significant digits and a dot decimal;
/// text cells are quoted when they contain a comma, quote or newline.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Cells must already be formatted (see the cell helpers below).
  void add(std::vector<std::string> cells);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return lines_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> lines_;
};

std::string cell(double v);
std::string cell(int v);
std::string cell(bool b);
std::string cell(const std::string& s);
std::string cell(const char* s);

/// Parses CSV text produced by CsvTable (quoted cells supported).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace nlsb
