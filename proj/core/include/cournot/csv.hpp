#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace cournot::csv {

/// Number formatting used for every emitted file: 12 significant digits.
std::string number(double value);

/// Comma-separated, LF-terminated rows with a header line.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  Writer& cell(std::string_view text);
  Writer& cell(double value);
  Writer& cell(long long value);
  Writer& cell(int value) { return cell(static_cast<long long>(value)); }
  Writer& cell(unsigned long long value);
  void end_row();

  const std::string& str() const { return buffer_; }

 private:
  void separator();

  std::size_t columns_;
  std::size_t current_ = 0;
  std::string buffer_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws InputError when absent.
  std::size_t column(std::string_view name) const;
};

Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

double to_double(std::string_view text);
long long to_integer(std::string_view text);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace cournot::csv
