#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace edgespec {

/// Fixed float formatting used by every artifact writer: shortest-round-trip
/// is locale-dependent across standard libraries, so artifacts pin %.17g.
std::string format_double(double x);

using CsvCell = std::variant<std::string, double, long>;

/// RFC-4180 CSV writer (UTF-8, CRLF-free: LF line endings, quoting only when
/// needed). Rows are written in the order given; callers sort beforehand.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<CsvCell>& cells);
  const std::string& str() const { return buf_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::string buf_;
  size_t width_ = 0;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace edgespec
