#ifndef ROBORD_PREPROCESS_HPP
#define ROBORD_PREPROCESS_HPP

#include <string>
#include <vector>

#include "robord/csv.hpp"
#include "robord/model.hpp"

namespace robord {

enum class ColumnRole { Response, Continuous, Binary, Categorical, Drop };

struct ColumnSpec {
  std::string name;
  ColumnRole role = ColumnRole::Continuous;
  std::string reference;            // categorical: reference level (optional)
  std::vector<std::string> levels;  // response: expected ordered levels (optional)
};

/// Fitted encoding state, reusable on new files so train and score data go
/// through identical transforms.
struct EncodedColumn {
  ColumnSpec spec;
  double mean = 0.0;  // continuous
  double sd = 1.0;
  std::vector<std::string> levels;  // binary: [level0, level1];
                                    // categorical: [reference, dummies...]
};

struct Preprocess {
  std::string response_name;
  std::vector<std::string> response_levels;  // ordered, mapped to 1..M
  std::vector<EncodedColumn> columns;        // design columns in spec order
  std::vector<std::string> feature_names;    // expanded design-matrix names
};

struct LoadedData {
  Dataset data;
  Preprocess preprocess;
};

/// Reads a CSV, fits the encoding (standardization constants, level maps),
/// and builds the design matrix: continuous columns to mean 0 / sd 1
/// (denominator n-1), binary to {0,1}, categoricals to reference-coded
/// dummies, response relabelled to 1..M preserving order.
LoadedData load_csv(const std::string& path,
                    const std::vector<ColumnSpec>& spec);

/// Applies an already-fitted encoding to another file (or the same one; the
/// result is then bit-identical to the fitted Dataset).
Dataset apply_preprocess(const CsvTable& table, const Preprocess& pre);
Dataset apply_preprocess_file(const std::string& path, const Preprocess& pre);

/// Column spec from JSON: either an array of column objects or an object
/// with a "columns" array; each entry {"name": ..., "role":
/// "response|continuous|binary|categorical|drop", "reference": ...,
/// "levels": [...]}.
std::vector<ColumnSpec> parse_column_spec_json(const std::string& json_text);

}  // namespace robord

#endif  // ROBORD_PREPROCESS_HPP
