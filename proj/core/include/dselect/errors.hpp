#pragma once

#include <stdexcept>
#include <string>

namespace dselect {

// Malformed input file (CSV syntax, bad serialized model, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates an expected schema (missing column,
// wrong dimensionality, unknown tag).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// A value or combination of values outside an operation's domain.
class ValueError : public std::invalid_argument {
public:
    explicit ValueError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace dselect
