#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patronage {

/// Splits on ',' with no quoting; the schema forbids commas inside fields.
std::vector<std::string_view> split_fields(std::string_view line);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

std::optional<long long> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

/// Line reader that tracks 1-based line numbers and strips a trailing '\r'.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool next(std::string& line);
  std::size_t line_number() const { return line_; }
  const std::string& file() const { return name_; }

 private:
  std::ifstream in_;
  std::string name_;
  std::size_t line_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace patronage
