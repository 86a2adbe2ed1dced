#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "covote/errors.hpp"

namespace covote::detail {

CsvReader::CsvReader(std::string path, std::string content)
    : path_(std::move(path)), content_(std::move(content)) {}

CsvReader CsvReader::open(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path, 0, 0, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return CsvReader(path, buffer.str());
}

std::optional<std::vector<std::string>> CsvReader::next() {
    // Skip blank lines between records.
    while (pos_ < content_.size() && (content_[pos_] == '\n' || content_[pos_] == '\r')) {
        if (content_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        }
        ++pos_;
    }
    if (pos_ >= content_.size()) return std::nullopt;

    record_line_ = line_;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool in_field = true;

    while (in_field) {
        if (pos_ >= content_.size()) {
            if (quoted) throw parse_error(path_, line_, column_, "unterminated quoted field");
            fields.push_back(std::move(field));
            break;
        }
        char c = content_[pos_];
        if (quoted) {
            if (c == '"') {
                if (pos_ + 1 < content_.size() && content_[pos_ + 1] == '"') {
                    field.push_back('"');
                    pos_ += 2;
                    column_ += 2;
                } else {
                    quoted = false;
                    ++pos_;
                    ++column_;
                    if (pos_ < content_.size() && content_[pos_] != ',' && content_[pos_] != '\n' &&
                        content_[pos_] != '\r')
                        throw parse_error(path_, line_, column_, "unexpected character after closing quote");
                }
            } else {
                if (c == '\n') {
                    ++line_;
                    column_ = 0;
                }
                field.push_back(c);
                ++pos_;
                ++column_;
            }
        } else if (c == '"') {
            if (!field.empty()) throw parse_error(path_, line_, column_, "quote inside unquoted field");
            quoted = true;
            ++pos_;
            ++column_;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++pos_;
            ++column_;
        } else if (c == '\n' || c == '\r') {
            fields.push_back(std::move(field));
            in_field = false;
            if (c == '\r' && pos_ + 1 < content_.size() && content_[pos_ + 1] == '\n') ++pos_;
            ++pos_;
            ++line_;
            column_ = 1;
        } else {
            field.push_back(c);
            ++pos_;
            ++column_;
        }
    }
    return fields;
}

CsvReader open_csv_with_header(const std::string& path, std::span<const std::string_view> expected_header) {
    CsvReader reader = CsvReader::open(path);
    auto header = reader.next();
    if (!header) throw parse_error(path, 1, 1, "missing header row");
    bool ok = header->size() == expected_header.size();
    if (ok) {
        for (std::size_t i = 0; i < header->size(); ++i) ok = ok && (*header)[i] == expected_header[i];
    }
    if (!ok) {
        std::string expected;
        for (std::size_t i = 0; i < expected_header.size(); ++i) {
            if (i) expected += ',';
            expected += expected_header[i];
        }
        throw parse_error(path, 1, 1, "unexpected header; expected '" + expected + "'");
    }
    return reader;
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

double parse_double_field(const CsvReader& reader, std::string_view field, std::string_view what) {
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw parse_error(reader.path(), reader.record_line(), 1,
                          "invalid " + std::string(what) + " '" + std::string(field) + "'");
    return value;
}

std::int64_t parse_int_field(const CsvReader& reader, std::string_view field, std::string_view what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw parse_error(reader.path(), reader.record_line(), 1,
                          "invalid " + std::string(what) + " '" + std::string(field) + "'");
    return value;
}

} // namespace covote::detail
