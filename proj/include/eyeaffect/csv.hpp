#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eyeaffect::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or -1.
    int column(std::string_view name) const;
};

/// Reads a header plus rows. `delimiter == 0` picks ',' or ';' from the
/// header line. Whitespace around cells is stripped; blank lines are skipped.
/// Throws DataError on ragged rows.
Table read(std::istream& in, char delimiter = 0);
Table read_file(const std::string& path, char delimiter = 0);

/// Locale-independent parse; throws DataError naming the 1-based data row and
/// the column when the cell is not a finite number.
double parse_double(std::string_view cell, std::size_t row, std::string_view column);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Appends `values` to `line` separated by commas.
void append_row(std::string& line, const std::vector<double>& values);

}  // namespace eyeaffect::csv
