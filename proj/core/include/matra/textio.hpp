#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace matra {

// Small text-format helpers shared by the notation parser and the TSV/CSV
// readers and writers.

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

// Splits one CSV record. Handles double-quoted fields with "" escapes;
// fields are trimmed of surrounding whitespace.
std::vector<std::string> split_csv_line(std::string_view line);
// Quotes a field only when it needs it (embedded comma, quote, or newline).
std::string csv_field(std::string_view value);

// Splits text into lines, accepting both \n and \r\n endings.
std::vector<std::string> split_lines(std::string_view text);

// Strict numeric parsing: the whole token must convert.
double parse_double(std::string_view token, std::string_view what);
long parse_long(std::string_view token, std::string_view what);

// Fixed-point formatting without locale surprises.
std::string format_double(double value, int decimals = 9);

std::string read_text_file(const std::filesystem::path& path);

// Writes through a temporary file in the target directory and renames on
// commit. An AtomicFile that is destroyed uncommitted removes its temporary,
// so a failing command leaves no partial outputs behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile();

  void write(std::string_view content);
  void commit();
  const std::filesystem::path& target() const { return target_; }

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  bool written_ = false;
  bool committed_ = false;
};

}  // namespace matra
