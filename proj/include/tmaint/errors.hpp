// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tmaint {

// Base for all domain errors so the CLI can map them to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedDiff : public Error {
public:
    MalformedDiff(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")")
        , line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class InvalidPattern : public Error {
public:
    using Error::Error;
};

class RepoAccessError : public Error {
public:
    using Error::Error;
};

class VcsInvocationError : public Error {
public:
    VcsInvocationError(const std::string& what, int exit_status, std::string diagnostics)
        : Error(what)
        , exit_status_(exit_status)
        , diagnostics_(std::move(diagnostics))
    {
    }
    int exit_status() const { return exit_status_; }
    const std::string& diagnostics() const { return diagnostics_; }

private:
    int exit_status_;
    std::string diagnostics_;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class SchemaVersionMismatch : public Error {
public:
    using Error::Error;
};

class ManifestMismatch : public Error {
public:
    using Error::Error;
};

class TimeoutExceeded : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class ProviderRejection : public Error {
public:
    ProviderRejection(const std::string& what, int status = 0, std::string body = {})
        : Error(what)
        , status_(status)
        , body_(std::move(body))
    {
    }
    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class EmbeddingFailure : public Error {
public:
    using Error::Error;
};

class SummarizationFailure : public Error {
public:
    using Error::Error;
};

class ParseFailure : public Error {
public:
    using Error::Error;
};

class MixedCommit : public Error {
public:
    using Error::Error;
};

class SubsetViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace tmaint
