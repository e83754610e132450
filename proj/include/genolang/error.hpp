#pragma once

#include <stdexcept>
#include <string>

namespace genolang {

// Error categories; the CLI maps these onto process exit codes.
enum class ErrorKind {
    format,          // malformed input text (FASTA/CSV/TSV), usually with a line number
    schema,          // missing or unexpected column
    value,           // value outside its domain (e.g. label 2)
    duplicate_id,
    empty_sequence,
    short_sequence,
    degenerate_sequence,
    stratification,
    single_class,
    dimension,
    architecture,
    divergence,
    spec,            // infeasible generator spec
    config,          // bad arguments or configuration
    io,              // file cannot be opened or written
    contract,        // caller violated a documented precondition
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) fail(ErrorKind::contract, message);
}

} // namespace genolang
