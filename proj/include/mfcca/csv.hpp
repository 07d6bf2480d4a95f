#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mfcca::csv {

/// One parsed record plus the 1-based line it started on.
struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Returns false at end of input.
    bool next(Record& rec);

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);

/// Writes one row terminated by "\n".
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal representation that round-trips a double; "nan"/"inf" for
/// non-finite values.
std::string format_double(double v);

}  // namespace mfcca::csv
