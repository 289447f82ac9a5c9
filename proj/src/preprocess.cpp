#include "robord/preprocess.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

namespace robord {
namespace {

bool try_parse_number(const std::string& s, double* out) {
  const char* begin = s.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  if (*begin == '\0') return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0' || errno == ERANGE || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

double parse_number(const std::string& s, std::size_t data_row,
                    const std::string& column) {
  double v;
  if (!try_parse_number(s, &v)) {
    std::ostringstream os;
    os << "non-numeric value '" << s << "' at data row " << data_row + 1
       << ", column '" << column << "'";
    throw DataError(os.str());
  }
  return v;
}

// Distinct values in order: numeric ascending when every value parses as a
// number, lexicographic otherwise.
std::vector<std::string> ordered_levels(const std::vector<std::string>& values) {
  std::set<std::string> distinct(values.begin(), values.end());
  std::vector<std::string> levels(distinct.begin(), distinct.end());
  bool all_numeric = true;
  for (const auto& v : levels) {
    double tmp;
    all_numeric = all_numeric && try_parse_number(v, &tmp);
  }
  if (all_numeric) {
    std::sort(levels.begin(), levels.end(),
              [](const std::string& a, const std::string& b) {
                double va, vb;
                try_parse_number(a, &va);
                try_parse_number(b, &vb);
                if (va != vb) return va < vb;
                return a < b;
              });
  }
  return levels;
}

std::vector<std::string> column_values(const CsvTable& table,
                                       const std::string& name) {
  const std::size_t j = table.column(name);
  std::vector<std::string> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row[j]);
  return out;
}

ColumnRole role_from_name(const std::string& role) {
  if (role == "response") return ColumnRole::Response;
  if (role == "continuous") return ColumnRole::Continuous;
  if (role == "binary") return ColumnRole::Binary;
  if (role == "categorical") return ColumnRole::Categorical;
  if (role == "drop") return ColumnRole::Drop;
  throw DataError("unknown column role '" + role +
                  "' (expected response|continuous|binary|categorical|drop)");
}

}  // namespace

LoadedData load_csv(const std::string& path,
                    const std::vector<ColumnSpec>& spec) {
  const CsvTable table = read_csv_file(path);
  if (table.rows.empty()) throw DataError(path + ": no data rows");

  Preprocess pre;
  int n_response = 0;
  for (const auto& cs : spec) {
    if (cs.role == ColumnRole::Response) {
      ++n_response;
      pre.response_name = cs.name;
      const auto values = column_values(table, cs.name);
      if (!cs.levels.empty()) {
        pre.response_levels = cs.levels;
        std::set<std::string> seen(values.begin(), values.end());
        for (const auto& lvl : cs.levels) {
          if (!seen.count(lvl)) {
            throw DataError("response category '" + lvl +
                            "' is absent from the data");
          }
        }
      } else {
        pre.response_levels = ordered_levels(values);
      }
      if (pre.response_levels.size() < 2) {
        throw DataError("response needs at least 2 categories");
      }
    }
  }
  if (n_response != 1) {
    throw DataError("column spec must contain exactly one response column");
  }

  for (const auto& cs : spec) {
    if (cs.role == ColumnRole::Response || cs.role == ColumnRole::Drop) {
      continue;
    }
    EncodedColumn enc;
    enc.spec = cs;
    const auto values = column_values(table, cs.name);
    switch (cs.role) {
      case ColumnRole::Continuous: {
        if (values.size() < 2) {
          throw DataError("column '" + cs.name +
                          "': need at least 2 rows to standardize");
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          sum += parse_number(values[i], i, cs.name);
        }
        enc.mean = sum / values.size();
        double ss = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          double v;
          try_parse_number(values[i], &v);
          ss += (v - enc.mean) * (v - enc.mean);
        }
        enc.sd = std::sqrt(ss / (values.size() - 1));
        if (enc.sd == 0.0) {
          throw DataError("column '" + cs.name +
                          "' is constant; cannot standardize");
        }
        pre.feature_names.push_back(cs.name);
        break;
      }
      case ColumnRole::Binary: {
        enc.levels = ordered_levels(values);
        if (enc.levels.size() != 2) {
          std::ostringstream os;
          os << "binary column '" << cs.name << "' has "
             << enc.levels.size() << " distinct values, expected 2";
          throw DataError(os.str());
        }
        pre.feature_names.push_back(cs.name);
        break;
      }
      case ColumnRole::Categorical: {
        std::vector<std::string> levels = ordered_levels(values);
        if (levels.size() < 2) {
          throw DataError("categorical column '" + cs.name +
                          "' has fewer than 2 levels");
        }
        std::string ref = cs.reference.empty() ? levels.front() : cs.reference;
        const auto it = std::find(levels.begin(), levels.end(), ref);
        if (it == levels.end()) {
          throw DataError("reference level '" + ref +
                          "' not present in column '" + cs.name + "'");
        }
        levels.erase(it);
        enc.levels.push_back(ref);
        for (const auto& lvl : levels) {
          enc.levels.push_back(lvl);
          pre.feature_names.push_back(cs.name + "=" + lvl);
        }
        break;
      }
      default:
        break;
    }
    pre.columns.push_back(std::move(enc));
  }
  if (pre.feature_names.empty()) {
    throw DataError("column spec produces an empty design matrix");
  }

  LoadedData out;
  out.preprocess = std::move(pre);
  out.data = apply_preprocess(table, out.preprocess);
  return out;
}

Dataset apply_preprocess(const CsvTable& table, const Preprocess& pre) {
  const std::size_t n = table.rows.size();
  if (n == 0) throw DataError("no data rows");

  Dataset data;
  data.n_categories = static_cast<int>(pre.response_levels.size());
  data.y.resize(static_cast<Eigen::Index>(n));
  const std::size_t yj = table.column(pre.response_name);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& v = table.rows[i][yj];
    const auto it = std::find(pre.response_levels.begin(),
                              pre.response_levels.end(), v);
    if (it == pre.response_levels.end()) {
      std::ostringstream os;
      os << "response value '" << v << "' at data row " << i + 1
         << " is not one of the fitted categories";
      throw DataError(os.str());
    }
    data.y[static_cast<Eigen::Index>(i)] =
        static_cast<int>(it - pre.response_levels.begin()) + 1;
  }

  data.X.resize(static_cast<Eigen::Index>(n),
                static_cast<Eigen::Index>(pre.feature_names.size()));
  Eigen::Index col = 0;
  for (const auto& enc : pre.columns) {
    const std::size_t j = table.column(enc.spec.name);
    switch (enc.spec.role) {
      case ColumnRole::Continuous: {
        for (std::size_t i = 0; i < n; ++i) {
          const double v = parse_number(table.rows[i][j], i, enc.spec.name);
          data.X(static_cast<Eigen::Index>(i), col) = (v - enc.mean) / enc.sd;
        }
        ++col;
        break;
      }
      case ColumnRole::Binary: {
        for (std::size_t i = 0; i < n; ++i) {
          const std::string& v = table.rows[i][j];
          if (v == enc.levels[0]) {
            data.X(static_cast<Eigen::Index>(i), col) = 0.0;
          } else if (v == enc.levels[1]) {
            data.X(static_cast<Eigen::Index>(i), col) = 1.0;
          } else {
            std::ostringstream os;
            os << "value '" << v << "' at data row " << i + 1
               << " not a fitted level of binary column '" << enc.spec.name
               << "'";
            throw DataError(os.str());
          }
        }
        ++col;
        break;
      }
      case ColumnRole::Categorical: {
        const Eigen::Index width =
            static_cast<Eigen::Index>(enc.levels.size()) - 1;
        for (std::size_t i = 0; i < n; ++i) {
          const std::string& v = table.rows[i][j];
          const auto it =
              std::find(enc.levels.begin(), enc.levels.end(), v);
          if (it == enc.levels.end()) {
            std::ostringstream os;
            os << "value '" << v << "' at data row " << i + 1
               << " not a fitted level of categorical column '"
               << enc.spec.name << "'";
            throw DataError(os.str());
          }
          const Eigen::Index k =
              static_cast<Eigen::Index>(it - enc.levels.begin());
          for (Eigen::Index w = 0; w < width; ++w) {
            data.X(static_cast<Eigen::Index>(i), col + w) =
                (k == w + 1) ? 1.0 : 0.0;
          }
        }
        col += width;
        break;
      }
      default:
        break;
    }
  }
  data.validate();
  return data;
}

Dataset apply_preprocess_file(const std::string& path, const Preprocess& pre) {
  return apply_preprocess(read_csv_file(path), pre);
}

std::vector<ColumnSpec> parse_column_spec_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("column spec: invalid JSON: ") + e.what());
  }
  const nlohmann::json* arr = &doc;
  if (doc.is_object()) {
    if (!doc.contains("columns")) {
      throw DataError("column spec: missing 'columns' array");
    }
    arr = &doc["columns"];
  }
  if (!arr->is_array()) throw DataError("column spec: expected an array");

  std::vector<ColumnSpec> spec;
  for (const auto& item : *arr) {
    if (!item.is_object() || !item.contains("name") ||
        !item.contains("role")) {
      throw DataError("column spec: each entry needs 'name' and 'role'");
    }
    ColumnSpec cs;
    cs.name = item["name"].get<std::string>();
    cs.role = role_from_name(item["role"].get<std::string>());
    if (item.contains("reference")) {
      cs.reference = item["reference"].get<std::string>();
    }
    if (item.contains("levels")) {
      for (const auto& lvl : item["levels"]) {
        cs.levels.push_back(lvl.is_string() ? lvl.get<std::string>()
                                            : lvl.dump());
      }
    }
    spec.push_back(std::move(cs));
  }
  return spec;
}

}  // namespace robord
