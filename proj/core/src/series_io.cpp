#include "nmgle/series_io.hpp"

#include <cstdio>
#include <fstream>

#include "nmgle/errors.hpp"

namespace nmgle {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string series_csv(const TimeGrid& grid, const std::vector<CsvColumn>& columns) {
    for (const CsvColumn& col : columns) {
        if (!col.series || !same_grid(col.series->grid, grid) ||
            col.series->values.size() != grid.n_points()) {
            throw GridError("CSV column '" + col.name + "' does not match the output grid");
        }
        if (col.with_stderr && col.series->stderrs.size() != grid.n_points()) {
            throw GridError("CSV column '" + col.name + "' has no stderr data");
        }
    }

    std::string out = "t";
    for (const CsvColumn& col : columns) {
        out += "," + col.name;
        if (col.with_stderr) out += "," + col.name + "_stderr";
    }
    out += "\n";
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        out += format_double(grid.time_at(i));
        for (const CsvColumn& col : columns) {
            out += "," + format_double(col.series->values[i]);
            if (col.with_stderr) out += "," + format_double(col.series->stderrs[i]);
        }
        out += "\n";
    }
    return out;
}

std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        out += (c == 0 ? "" : ",") + header[c];
    }
    out += "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw IoError("CSV row width does not match the header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += (c == 0 ? "" : ",") + format_double(row[c]);
        }
        out += "\n";
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace nmgle
