#pragma once

#include <set>
#include <string>
#include <vector>

namespace dselect {

// Text table as read from disk: header names plus string cells. Cell values
// matching one of missingTokens are treated as absent by downstream
// preprocessing.
struct RawTable {
    std::vector<std::string> columnNames;
    std::vector<std::vector<std::string>> rows;  // each row has columnNames.size() cells
    std::set<std::string> missingTokens{"", "NA", "null"};

    std::size_t rowCount() const { return rows.size(); }
    std::size_t columnCount() const { return columnNames.size(); }
    // Index of a named column, or -1.
    int columnIndex(const std::string& name) const;
    bool isMissing(const std::string& cell) const { return missingTokens.count(cell) > 0; }
};

// RFC-4180 parser: quoted fields, doubled-quote escapes, CR/LF and LF line
// ends, newlines inside quotes. Throws ParseError (with the 1-based row
// number) on ragged rows or dangling quotes, SchemaError when a required
// column is absent or a header name repeats.
RawTable parseCsv(const std::string& text, const std::vector<std::string>& requiredColumns = {});
RawTable loadCsv(const std::string& path, const std::vector<std::string>& requiredColumns = {});

// Escapes per RFC 4180 (quotes a field when it contains comma/quote/newline).
std::string csvEscape(const std::string& field);

}  // namespace dselect
