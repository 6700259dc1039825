#include "eyeaffect/csv.hpp"

#include "eyeaffect/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace eyeaffect::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split(std::string_view line, char delimiter) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delimiter, start);
        const std::string_view cell =
            line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        cells.emplace_back(trim(cell));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

}  // namespace

int Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

Table read(std::istream& in, char delimiter) {
    Table table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (!have_header) {
            if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
                static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
                line.erase(0, 3);
            }
            if (delimiter == 0) {
                delimiter = line.find(';') != std::string::npos && line.find(',') == std::string::npos ? ';' : ',';
            }
            table.header = split(line, delimiter);
            have_header = true;
            continue;
        }
        auto cells = split(line, delimiter);
        if (cells.size() != table.header.size()) {
            throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw DataError("csv input has no header row");
    }
    return table;
}

Table read_file(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return read(in, delimiter);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

double parse_double(std::string_view cell, std::size_t row, std::string_view column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw DataError("row " + std::to_string(row) + ", column '" + std::string(column) +
                        "': cannot parse '" + std::string(cell) + "' as a number");
    }
    return value;
}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void append_row(std::string& line, const std::vector<double>& values) {
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0 || !line.empty()) {
            line.push_back(',');
        }
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), values[i]);
        line.append(buf, ptr);
    }
}

}  // namespace eyeaffect::csv
