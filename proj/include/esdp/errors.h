#pragma once

#include <stdexcept>
#include <string>

namespace esdp {

/// Base for every domain error. `name()` is the error identifier that the CLI
/// surfaces verbatim (e.g. "SchemaViolation").
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnparsableSource : public Error {
public:
    UnparsableSource(int line, int column, const std::string& what)
        : Error("UnparsableSource", std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class UnparsableQuery : public Error {
public:
    UnparsableQuery(std::string token, const std::string& what)
        : Error("UnparsableQuery", what + (token.empty() ? "" : " near '" + token + "'")),
          token_(std::move(token)) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

class InvalidThreshold : public Error {
public:
    explicit InvalidThreshold(const std::string& what) : Error("InvalidThreshold", what) {}
};

class MiningLimitExceeded : public Error {
public:
    explicit MiningLimitExceeded(const std::string& what) : Error("MiningLimitExceeded", what) {}
};

class SchemaViolation : public Error {
public:
    SchemaViolation(std::string path, const std::string& what)
        : Error("SchemaViolation", path + ": " + what), path_(std::move(path)) {}

    /// Element path of the offending node, e.g. "/esdp-repository/patterns/pattern[2]/support".
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class MalformedControlNesting : public Error {
public:
    explicit MalformedControlNesting(const std::string& what) : Error("MalformedControlNesting", what) {}
};

class UndefinedMetric : public Error {
public:
    explicit UndefinedMetric(const std::string& what) : Error("UndefinedMetric", what) {}
};

class DegenerateLabels : public Error {
public:
    explicit DegenerateLabels(const std::string& what) : Error("DegenerateLabels", what) {}
};

} // namespace esdp
