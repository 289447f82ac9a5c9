#ifndef ROBORD_CSV_HPP
#define ROBORD_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace robord {

/// Parsed CSV: header row plus string cells, RFC 4180 quoting rules.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name; throws DataError if absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Writes via a temp file and rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

/// Shortest round-trippable decimal representation ("%.17g").
std::string format_double(double v);

}  // namespace robord

#endif  // ROBORD_CSV_HPP
