#pragma once

#include <istream>
#include <optional>

#include "cvtest/generators.hpp"
#include "cvtest/sample.hpp"

namespace cvtest {

/// Column selection for CSV ingestion. Indices are zero-based. Without
/// `embed`, columns x_col/y_col form the sample directly; with `embed`, the
/// single column series_col is read as a series and embedded into pairs.
struct CsvOptions {
  int x_col = 0;
  int y_col = 1;
  std::optional<EmbedMode> embed;
  int series_col = 0;
};

struct LoadedData {
  Sample sample;
  std::optional<EmbeddedSeries> series;
};

/// Reads comma-separated data. A first line whose selected cells do not
/// parse as numbers is treated as a header. Unparseable or non-finite cells
/// and short files raise InputError with a line-precise message.
[[nodiscard]] LoadedData load_csv(std::istream& in, const CsvOptions& opt);

}  // namespace cvtest
