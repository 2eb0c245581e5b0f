#pragma once

#include <stdexcept>
#include <string>

namespace smerisk {

// Broad error classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
    parameter,         // invalid argument or configuration value
    schema,            // CSV header does not match the canonical layout
    parse,             // malformed cell or document
    empty_input,       // nothing to read / nothing to write
    io,                // file could not be opened or written
    undefined_value,   // e.g. correlation of a constant series
    degenerate_labels, // training set holds a single class
    format_version,    // unsupported serialized model format or type
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::string column)
        : Error(ErrorKind::schema, what), column_(std::move(column)) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class ParseError : public Error {
public:
    // row is the 1-based data row (header excluded); 0 when not row-specific.
    ParseError(const std::string& what, std::size_t row = 0)
        : Error(ErrorKind::parse, what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what) : Error(ErrorKind::empty_input, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class UndefinedValueError : public Error {
public:
    explicit UndefinedValueError(const std::string& what)
        : Error(ErrorKind::undefined_value, what) {}
};

class DegenerateLabelsError : public Error {
public:
    explicit DegenerateLabelsError(const std::string& what)
        : Error(ErrorKind::degenerate_labels, what) {}
};

class FormatVersionError : public Error {
public:
    explicit FormatVersionError(const std::string& what)
        : Error(ErrorKind::format_version, what) {}
};

} // namespace smerisk
