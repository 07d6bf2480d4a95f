#include "mfcca/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace mfcca::csv {

bool Reader::next(Record& rec) {
    rec.fields.clear();
    rec.line = line_;
    int c = in_.get();
    if (c == EOF) return false;

    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    for (;; c = in_.get()) {
        if (quoted) {
            if (c == EOF) break;
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(static_cast<char>(c));
            }
            continue;
        }
        if (c == EOF || c == '\n') {
            if (c == '\n') ++line_;
            if (!field_was_quoted && !field.empty() && field.back() == '\r') field.pop_back();
            rec.fields.push_back(std::move(field));
            return true;
        }
        if (c == ',') {
            rec.fields.push_back(std::move(field));
            field.clear();
            field_was_quoted = false;
        } else if (c == '"' && field.empty() && !field_was_quoted) {
            quoted = true;
            field_was_quoted = true;
        } else if (c == '\r' && field_was_quoted) {
            // CR after a closing quote belongs to the line terminator.
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    rec.fields.push_back(std::move(field));
    return true;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << quote(fields[i]);
    }
    out << '\n';
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace mfcca::csv
