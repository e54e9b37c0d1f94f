#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "nqw/errors.hpp"

namespace nqw::experiments {

/// Shortest decimal that parses back to the same double. Non-finite values become "".
inline std::string format_double(double v) {
    if (!std::isfinite(v)) return {};
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) throw NumericFailure("cannot format double");
    return {buf, res.ptr};
}

using Cell = std::variant<double, long long, std::string>;

/// Column-labelled rows, written as CSV with a header line.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != header.size()) throw InvalidState("row width does not match header");
        rows.push_back(std::move(row));
    }
};

inline std::string to_csv_field(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << to_csv_field(row[k]);
        os << '\n';
    }
}

inline void write_csv(const std::string& path, const Table& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path + "'");
    write_csv(os, t);
}

}  // namespace nqw::experiments
