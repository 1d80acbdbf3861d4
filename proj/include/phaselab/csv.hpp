#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phaselab {

using CsvField = std::variant<std::string, double, std::int64_t, std::uint64_t>;

/// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_double(double value);

/// RFC 4180: fields containing a comma, quote, CR or LF are wrapped in
/// double quotes with embedded quotes doubled.
std::string csv_escape(std::string_view field);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void write_row(const std::vector<CsvField>& fields);
    void write_header(const std::vector<std::string>& names);

private:
    std::ostream& out_;
};

}  // namespace phaselab
