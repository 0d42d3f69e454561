#pragma once

#include <string>
#include <vector>

namespace plurilab::csv {

/// Floating-point formatting used in every CSV artifact: 17 significant
/// digits, enough to round-trip a double bit-exactly.
std::string format_double(double x);

/// Minimal CSV table with a fixed column order.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells);
    std::string to_string() const;
    void write(const std::string& path) const;

    static std::string cell(double x) { return format_double(x); }
    static std::string cell(const std::string& s) { return s; }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace plurilab::csv
