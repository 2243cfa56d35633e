#pragma once

#include <optional>
#include <string>
#include <vector>

#include "numkern.hpp"

namespace mixgbn {

// m observations (rows) of n variables (columns).
struct Dataset {
  Matrix values;
  std::vector<std::string> names;
  // Known class labels, one per row, as read from the label column.
  std::optional<std::vector<std::string>> labels;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

// Reads an RFC-4180 style CSV with a header row. When `label_column` names a
// column it is kept aside as class labels and excluded from the matrix.
// With `standardize`, every column is shifted/scaled to sample mean 0 and
// sample variance 1 (denominator m-1); a constant column is an error.
Dataset load_csv(const std::string& path, bool standardize,
                 const std::optional<std::string>& label_column = std::nullopt);

Dataset parse_csv(const std::string& text, bool standardize,
                  const std::optional<std::string>& label_column = std::nullopt);

void standardize_columns(Dataset& data);

// Header plus rows; doubles use the shortest round-trip representation.
std::string format_csv(const Dataset& data, const std::optional<std::string>& label_column = std::nullopt);

std::string format_double(double v);

// Rows `rows` of `data`, labels carried along.
Dataset select_rows(const Dataset& data, const std::vector<int>& rows);

}  // namespace mixgbn
