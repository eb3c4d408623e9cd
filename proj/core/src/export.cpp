#include "edgespec/export.hpp"

#include <cstdio>
#include <fstream>

#include "edgespec/lattice.hpp"

namespace edgespec {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += quote(header[i]);
  }
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != width_) throw Error("CsvWriter: row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    if (std::holds_alternative<std::string>(cells[i]))
      buf_ += quote(std::get<std::string>(cells[i]));
    else if (std::holds_alternative<double>(cells[i]))
      buf_ += format_double(std::get<double>(cells[i]));
    else
      buf_ += std::to_string(std::get<long>(cells[i]));
  }
  buf_ += '\n';
}

void CsvWriter::write(const std::filesystem::path& path) const {
  write_text_file(path, buf_);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f.write(content.data(), long(content.size()));
  if (!f) throw Error("write failed: " + path.string());
}

}  // namespace edgespec
