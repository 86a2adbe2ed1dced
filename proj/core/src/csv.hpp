#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covote::detail {

// Minimal strict CSV reader: comma separator, double-quote quoting with
// doubled-quote escapes, LF or CRLF line ends.  Parse failures throw
// covote::parse_error with the file position.
class CsvReader {
public:
    CsvReader(std::string path, std::string content);

    // Opens and slurps the file; missing file throws parse_error at 0:0.
    static CsvReader open(const std::string& path);

    // Next record, or nullopt at end of input.  Blank lines are skipped.
    std::optional<std::vector<std::string>> next();

    const std::string& path() const { return path_; }
    std::size_t record_line() const { return record_line_; } // line the last record started on

private:
    std::string path_;
    std::string content_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    std::size_t record_line_ = 1;
};

// Header-checked reader: validates the exact expected header on open.
CsvReader open_csv_with_header(const std::string& path, std::span<const std::string_view> expected_header);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double value);

// Strict numeric field parsing with positioned errors.
double parse_double_field(const CsvReader& reader, std::string_view field, std::string_view what);
std::int64_t parse_int_field(const CsvReader& reader, std::string_view field, std::string_view what);

} // namespace covote::detail
