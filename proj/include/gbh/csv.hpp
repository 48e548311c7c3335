#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gbh::csv {

/// Splits one line on commas. Double-quoted fields may contain commas and
/// doubled quotes. Surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row.
    std::vector<std::size_t> lines;

    /// Column position by name, if present.
    std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads a header line followed by data rows. Blank lines and lines starting
/// with '#' are skipped. Throws std::runtime_error naming the line when a row
/// has a different field count than the header.
Table read(std::istream& in);

/// Shortest representation that round-trips; "inf" for +infinity.
std::string format_full(double v);
/// Six significant digits, no locale dependence.
std::string format_sig6(double v);

std::optional<double> parse_double(std::string_view s);

}  // namespace gbh::csv
