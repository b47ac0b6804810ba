#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace metaweave::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 parser: quoted fields, "" escapes, CRLF or LF record breaks,
/// embedded newlines inside quotes. The first record is the header.
Table parse(std::string_view text);

/// Writer quoting exactly the fields that need it.
std::string write(const Table& table);

} // namespace metaweave::csv
