#include "dselect/csv.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dselect/errors.hpp"

namespace dselect {

int RawTable::columnIndex(const std::string& name) const {
    for (std::size_t i = 0; i < columnNames.size(); ++i) {
        if (columnNames[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

// Splits CSV text into records of fields. Tracks the record number for error
// messages; a record may span multiple physical lines when quoted.
std::vector<std::vector<std::string>> splitRecords(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> current;
    std::string field;
    bool inQuotes = false;
    bool fieldWasQuoted = false;
    bool recordHadQuote = false;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto endField = [&]() {
        current.push_back(field);
        recordHadQuote = recordHadQuote || fieldWasQuoted;
        field.clear();
        fieldWasQuoted = false;
    };
    // Blank lines (a record of exactly one empty unquoted field) are skipped,
    // matching how common CSV tooling treats them.
    auto endRecord = [&]() {
        endField();
        const bool blankLine = current.size() == 1 && current[0].empty() && !recordHadQuote;
        if (!blankLine) records.push_back(std::move(current));
        current.clear();
        recordHadQuote = false;
    };

    while (i < n) {
        const char c = text[i];
        if (inQuotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    inQuotes = false;
                    ++i;
                }
            } else {
                field.push_back(c);
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || fieldWasQuoted) {
                    throw ParseError("csv: stray quote in record " + std::to_string(records.size() + 1));
                }
                inQuotes = true;
                fieldWasQuoted = true;
                ++i;
                break;
            case ',':
                endField();
                ++i;
                break;
            case '\r':
                if (i + 1 < n && text[i + 1] == '\n') ++i;
                endRecord();
                ++i;
                break;
            case '\n':
                endRecord();
                ++i;
                break;
            default:
                field.push_back(c);
                ++i;
                break;
        }
    }
    if (inQuotes) {
        throw ParseError("csv: unterminated quoted field in record " + std::to_string(records.size() + 1));
    }
    if (!field.empty() || fieldWasQuoted || !current.empty()) {
        endRecord();
    }
    return records;
}

}  // namespace

RawTable parseCsv(const std::string& text, const std::vector<std::string>& requiredColumns) {
    auto records = splitRecords(text);
    if (records.empty()) {
        throw ParseError("csv: empty input, expected a header row");
    }
    RawTable table;
    table.columnNames = records.front();
    {
        std::set<std::string> seen;
        for (const auto& name : table.columnNames) {
            if (!seen.insert(name).second) {
                throw SchemaError("csv: duplicate column name '" + name + "'");
            }
        }
    }
    const std::size_t width = table.columnNames.size();
    table.rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw ParseError("csv: row " + std::to_string(r + 1) + " has " +
                             std::to_string(records[r].size()) + " cells, expected " +
                             std::to_string(width));
        }
        table.rows.push_back(std::move(records[r]));
    }
    for (const auto& required : requiredColumns) {
        if (table.columnIndex(required) < 0) {
            throw SchemaError("csv: required column '" + required + "' not present");
        }
    }
    return table;
}

RawTable loadCsv(const std::string& path, const std::vector<std::string>& requiredColumns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("csv: cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseCsv(buffer.str(), requiredColumns);
}

std::string csvEscape(const std::string& field) {
    const bool needsQuotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needsQuotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace dselect
