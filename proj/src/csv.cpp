#include "nlsb/csv.hpp"

#include "nlsb/config.hpp"
#include "nlsb/error.hpp"
#include "nlsb/field_io.hpp"

namespace nlsb {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

std::string cell(double v) { return format_double(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool b) { return b ? "true" : "false"; }
std::string cell(const char* s) { return cell(std::string(s)); }

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void CsvTable::add(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    fail(ErrorKind::Shape, "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(header_.size()));
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  lines_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& l : lines_) out += l + '\n';
  return out;
}

void CsvTable::write(const std::string& path) const { write_file(path, str()); }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace nlsb
