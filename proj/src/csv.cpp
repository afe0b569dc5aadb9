#include "radbound/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace radbound::csv {

std::string format_double(double value) {
    char buf[40];
    // %.17g round-trips any double; trim to the shortest form that still
    // round-trips so files stay readable.
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        double parsed = 0.0;
        std::sscanf(buf, "%lf", &parsed);
        if (parsed == value || (value != value && parsed != parsed)) break;
    }
    return buf;
}

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path);
    row(header);
}

Writer::~Writer() { close(); }

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw std::invalid_argument("csv: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void Writer::close() {
    if (out_.is_open()) {
        out_.flush();
        out_.close();
    }
}

std::string cell(double value) { return format_double(value); }
std::string cell(std::size_t value) { return std::to_string(value); }
std::string cell(int value) { return std::to_string(value); }
std::string cell(bool value) { return value ? "1" : "0"; }

}  // namespace radbound::csv
