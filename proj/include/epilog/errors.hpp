#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epilog {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- memory ---

class RejectedLog : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SchemaVersionUnsupported : public Error {
public:
    using Error::Error;
};

// Carries the 1-based line number of the offending record.
class CorruptRecord : public Error {
public:
    CorruptRecord(std::size_t line, const std::string& detail)
        : Error("corrupt record at line " + std::to_string(line) + ": " + detail),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// --- embedding ---

class EmptyInput : public Error {
public:
    using Error::Error;
};

class InvalidDim : public Error {
public:
    using Error::Error;
};

class ProviderUnavailable : public Error {
public:
    using Error::Error;
};

class ModalityMismatch : public Error {
public:
    using Error::Error;
};

// --- retrieval ---

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// --- reasoner / executor ---

class UnparseableKey : public Error {
public:
    using Error::Error;
};

class BudgetTooSmall : public Error {
public:
    using Error::Error;
};

// --- backends ---

class BackendError : public Error {
public:
    using Error::Error;
};

class EmptyCompletion : public BackendError {
public:
    using BackendError::BackendError;
};

class NoRouteMatched : public BackendError {
public:
    using BackendError::BackendError;
};

class Timeout : public BackendError {
public:
    using BackendError::BackendError;
};

class HttpStatus : public BackendError {
public:
    HttpStatus(int status, const std::string& detail)
        : BackendError("http status " + std::to_string(status) + ": " + detail),
          status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class MalformedResponse : public BackendError {
public:
    using BackendError::BackendError;
};

// Script / fixture parse failure; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& detail)
        : Error("parse error at line " + std::to_string(line) + ": " + detail),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// --- environments ---

class EnvError : public Error {
public:
    using Error::Error;
};

class UnknownTask : public EnvError {
public:
    using EnvError::EnvError;
};

// --- harness ---

class ConfigError : public Error {
public:
    using Error::Error;
};

class OverlapError : public Error {
public:
    using Error::Error;
};

}  // namespace epilog
