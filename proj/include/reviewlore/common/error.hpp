#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace reviewlore {

// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or ragged input to a computation that must not be imputed.
class StructuralError : public Error {
public:
    using Error::Error;
};

// An operation was called outside its documented domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class InvariantError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class MboxFramingError : public Error {
public:
    MboxFramingError(std::size_t offset, const std::string& what)
        : Error("mbox framing error at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class FixtureMissingError : public Error {
public:
    FixtureMissingError(std::string template_id, int version, std::string digest, std::string path)
        : Error("replay fixture missing for " + template_id + " v" + std::to_string(version) +
                ", digest " + digest + " (expected " + path + ")"),
          template_id_(std::move(template_id)), digest_(std::move(digest)) {}

    const std::string& template_id() const noexcept { return template_id_; }
    const std::string& digest() const noexcept { return digest_; }

private:
    std::string template_id_;
    std::string digest_;
};

class TransportError : public Error {
public:
    TransportError(const std::string& what, int status, bool retryable)
        : Error(what), status_(status), retryable_(retryable) {}

    int status() const noexcept { return status_; }
    bool retryable() const noexcept { return retryable_; }

private:
    int status_;
    bool retryable_;
};

class StructuredOutputError : public Error {
public:
    StructuredOutputError(const std::string& what, std::vector<std::string> raw_candidates,
                          std::vector<std::string> problems)
        : Error(what), raw_candidates_(std::move(raw_candidates)), problems_(std::move(problems)) {}

    const std::vector<std::string>& raw_candidates() const noexcept { return raw_candidates_; }
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> raw_candidates_;
    std::vector<std::string> problems_;
};

class SchemaVersionError : public Error {
public:
    explicit SchemaVersionError(int found)
        : Error("unsupported rule set schema_version " + std::to_string(found)), found_(found) {}

    int found() const noexcept { return found_; }

private:
    int found_;
};

} // namespace reviewlore
