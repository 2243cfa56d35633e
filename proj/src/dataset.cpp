#include "dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace mixgbn {

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  const auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    if (field_started || !row.empty()) {
      end_field();
      rows.push_back(std::move(row));
      row.clear();
    }
  };
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < text.size() && text[k + 1] == '"') {
          field += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw InvalidArgument("csv: stray quote inside unquoted field");
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw InvalidArgument("csv: unterminated quoted field");
  end_row();
  return rows;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  std::size_t b = 0, e = cell.size();
  while (b < e && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(cell[e - 1]))) --e;
  double v = 0.0;
  const char* first = cell.data() + b;
  if (b < e && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + e, v);
  if (b == e || ec != std::errc() || ptr != cell.data() + e || !std::isfinite(v))
    throw InvalidArgument("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                          ", column " + std::to_string(col + 1));
  return v;
}

}  // namespace

Dataset parse_csv(const std::string& text, bool standardize,
                  const std::optional<std::string>& label_column) {
  const auto rows = split_csv(text);
  if (rows.empty()) throw InvalidArgument("csv: missing header row");
  const auto& header = rows.front();
  std::optional<std::size_t> label_idx;
  if (label_column) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == *label_column) label_idx = c;
    if (!label_idx) throw InvalidArgument("csv: label column '" + *label_column + "' not found");
  }
  Dataset d;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx) d.names.push_back(header[c]);
  if (d.names.empty()) throw InvalidArgument("csv: no variable columns");
  const auto m = rows.size() - 1;
  if (m == 0) throw InvalidArgument("csv: no data rows");
  d.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d.names.size()));
  if (label_idx) d.labels.emplace();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw InvalidArgument("csv: row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) + " fields, header has " +
                            std::to_string(header.size()));
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == label_idx) {
        d.labels->push_back(row[c]);
        continue;
      }
      d.values(static_cast<Eigen::Index>(r - 1), col++) = parse_number(row[c], r, c);
    }
  }
  if (standardize) standardize_columns(d);
  return d;
}

Dataset load_csv(const std::string& path, bool standardize,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), standardize, label_column);
}

void standardize_columns(Dataset& data) {
  const auto m = data.values.rows();
  if (m < 2) throw InvalidArgument("standardize: need at least two rows");
  for (Eigen::Index c = 0; c < data.values.cols(); ++c) {
    auto col = data.values.col(c);
    const double mean = col.mean();
    col.array() -= mean;
    const double var = col.squaredNorm() / static_cast<double>(m - 1);
    if (!(var > 0.0))
      throw InvalidArgument("standardize: column '" +
                            (c < static_cast<Eigen::Index>(data.names.size()) ? data.names[c]
                                                                               : std::to_string(c)) +
                            "' is constant");
    col /= std::sqrt(var);
    // Second pass removes the residual mean left by rounding.
    col.array() -= col.mean();
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string format_csv(const Dataset& data, const std::optional<std::string>& label_column) {
  std::ostringstream os;
  const bool with_labels = label_column && data.labels;
  for (int c = 0; c < data.cols(); ++c) {
    if (c) os << ',';
    os << quote_if_needed(c < static_cast<int>(data.names.size()) ? data.names[c]
                                                                  : "X" + std::to_string(c + 1));
  }
  if (with_labels) os << ',' << quote_if_needed(*label_column);
  os << '\n';
  for (int r = 0; r < data.rows(); ++r) {
    for (int c = 0; c < data.cols(); ++c) {
      if (c) os << ',';
      os << format_double(data.values(r, c));
    }
    if (with_labels) os << ',' << quote_if_needed((*data.labels)[r]);
    os << '\n';
  }
  return os.str();
}

Dataset select_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.names = data.names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), data.values.cols());
  if (data.labels) out.labels.emplace();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= data.rows()) throw InvalidArgument("select_rows: row out of range");
    out.values.row(static_cast<Eigen::Index>(k)) = data.values.row(rows[k]);
    if (data.labels) out.labels->push_back((*data.labels)[rows[k]]);
  }
  return out;
}

}  // namespace mixgbn
