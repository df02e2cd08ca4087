#pragma once

#include <stdexcept>
#include <string>

namespace pidgraph {

// Every failure the engine raises derives from Error so callers can catch
// one type; the subclasses map onto the CLI exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Unreadable or undecodable input (exit 2).
class InputError : public Error {
public:
    using Error::Error;
};

// Malformed or invalid JSON payloads (exit 3). `record` is the offending
// list index, -1 when the problem is not tied to one record.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, int record = -1)
        : Error(what), record_(record) {}
    int record() const noexcept { return record_; }

private:
    int record_;
};

class OrientationError : public Error {
public:
    using Error::Error;
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    using Error::Error;
};

} // namespace pidgraph
