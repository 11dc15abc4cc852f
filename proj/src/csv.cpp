#include "cvtest/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "cvtest/errors.hpp"

namespace cvtest {

namespace {

// Splits one CSV line on commas; cells keep surrounding whitespace trimmed.
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string cell = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!cell.empty() && is_space(cell.front())) cell.erase(cell.begin());
    while (!cell.empty() && is_space(cell.back())) cell.pop_back();
    cells.push_back(std::move(cell));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(const std::string& cell, double* out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc{} && ptr == end && !cell.empty();
}

// Extracts the selected cell of a split line as a finite number; the line
// number makes diagnostics precise.
double extract(const std::vector<std::string>& cells, int col, std::size_t line_no) {
  if (col < 0 || static_cast<std::size_t>(col) >= cells.size()) {
    throw InputError("line " + std::to_string(line_no) + ": column " +
                     std::to_string(col) + " is missing (line has " +
                     std::to_string(cells.size()) + " columns)");
  }
  double v = 0.0;
  if (!parse_number(cells[static_cast<std::size_t>(col)], &v)) {
    throw InputError("line " + std::to_string(line_no) + ": cannot parse '" +
                     cells[static_cast<std::size_t>(col)] + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw InputError("line " + std::to_string(line_no) + ": non-finite value '" +
                     cells[static_cast<std::size_t>(col)] + "'");
  }
  return v;
}

bool row_parses(const std::vector<std::string>& cells,
                const std::vector<int>& cols) {
  for (int col : cols) {
    if (col < 0 || static_cast<std::size_t>(col) >= cells.size()) return false;
    double v = 0.0;
    if (!parse_number(cells[static_cast<std::size_t>(col)], &v)) return false;
  }
  return true;
}

}  // namespace

LoadedData load_csv(std::istream& in, const CsvOptions& opt) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Skip fully blank lines.
    bool blank = true;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    rows.push_back(split_line(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw InputError("input has no data rows");

  const std::vector<int> needed_cols =
      opt.embed ? std::vector<int>{opt.series_col}
                : std::vector<int>{opt.x_col, opt.y_col};

  // A first line whose selected cells do not parse is a header.
  std::size_t first_row = 0;
  if (!row_parses(rows[0], needed_cols)) first_row = 1;

  const std::size_t data_rows = rows.size() - first_row;

  LoadedData out;
  if (opt.embed) {
    if (data_rows < 6) {
      throw InputError("need at least 6 series values to embed into 5 pairs, got " +
                       std::to_string(data_rows));
    }
    std::vector<double> series(data_rows);
    for (std::size_t r = 0; r < data_rows; ++r) {
      series[r] = extract(rows[first_row + r], opt.series_col,
                          line_numbers[first_row + r]);
    }
    out.sample = embed_series(series, *opt.embed);
    out.series = EmbeddedSeries{std::move(series), *opt.embed};
  } else {
    if (data_rows < 5) {
      throw InputError("need at least 5 observations, got " +
                       std::to_string(data_rows));
    }
    out.sample.x.resize(data_rows);
    out.sample.y.resize(data_rows);
    for (std::size_t r = 0; r < data_rows; ++r) {
      out.sample.x[r] =
          extract(rows[first_row + r], opt.x_col, line_numbers[first_row + r]);
      out.sample.y[r] =
          extract(rows[first_row + r], opt.y_col, line_numbers[first_row + r]);
    }
  }
  out.sample.validate();
  return out;
}

}  // namespace cvtest
