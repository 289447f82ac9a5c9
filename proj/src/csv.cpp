#include "robord/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robord/model.hpp"

namespace robord {
namespace {

// One RFC 4180 record; returns false on end of input. Quoted fields may
// contain commas, doubled quotes, and embedded line breaks.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string cell;
  bool in_quotes = false;
  bool saw_any = false;
  int c;
  while ((c = in.get()) != EOF) {
    saw_any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          cell.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(static_cast<char>(c));
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else {
      cell.push_back(static_cast<char>(c));
    }
  }
  if (!saw_any) return false;
  fields.push_back(std::move(cell));
  return true;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw DataError("column '" + name + "' not found in CSV header");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  if (!read_record(in, table.header) || table.header.empty()) {
    throw DataError("CSV: missing header row");
  }
  std::vector<std::string> fields;
  std::size_t line = 1;
  while (read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      std::ostringstream os;
      os << "CSV: row " << line << " has " << fields.size()
         << " fields, expected " << table.header.size();
      throw DataError(os.str());
    }
    table.rows.push_back(fields);
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return read_csv(in);
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + tmp);
    out << content;
    if (!out) throw DataError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw DataError("rename failed: " + tmp + " -> " + path + " (" +
                    ec.message() + ")");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace robord
