#include "plurilab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plurilab::csv {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw std::invalid_argument("csv: row width mismatch");
    rows_.push_back(std::move(cells));
}

std::string Table::to_string() const {
    std::string out;
    for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void Table::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("csv: cannot open " + path);
    f << to_string();
}

} // namespace plurilab::csv
