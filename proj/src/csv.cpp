#include "phaselab/csv.hpp"

#include <charconv>
#include <cmath>

namespace phaselab {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::write_row(const std::vector<CsvField>& fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out_ << ',';
        first = false;
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) {
                    out_ << csv_escape(v);
                } else if constexpr (std::is_same_v<T, double>) {
                    out_ << format_double(v);
                } else {
                    out_ << v;
                }
            },
            f);
    }
    out_ << "\r\n";
}

void CsvWriter::write_header(const std::vector<std::string>& names) {
    std::vector<CsvField> fields(names.begin(), names.end());
    write_row(fields);
}

}  // namespace phaselab
