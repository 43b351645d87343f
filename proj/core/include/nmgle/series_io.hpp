#pragma once

#include <string>
#include <vector>

#include "nmgle/observables.hpp"

namespace nmgle {

/// Round-trip decimal rendering (17 significant digits).
std::string format_double(double v);

/// One CSV column: a series and whether its ensemble standard error column
/// follows it.
struct CsvColumn {
    std::string name;
    const TimeSeries* series = nullptr;
    bool with_stderr = false;
};

/// Series CSV: header row, `t` first, one column per series plus one
/// `<name>_stderr` column per stochastic series, 17 significant digits.
std::string series_csv(const TimeGrid& grid, const std::vector<CsvColumn>& columns);

/// Generic small-table CSV with the same number formatting.
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace nmgle
