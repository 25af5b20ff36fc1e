// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace teamlab
{

/// Root of every exception thrown by the library.
class Error: public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class ValidationError: public Error
{
  public:
    enum class Kind
    {
        DuplicateLabel,
        GoldNotInOptions,
        TooFewOptions,
        TooManyOptions,
        NonContiguousLabels,
        InvalidConfig,
        PreconditionViolated,
    };

    ValidationError(Kind kind, std::string field, const std::string& detail):
        Error(field + ": " + detail), _kind(kind), _field(std::move(field))
    {
    }

    [[nodiscard]] Kind kind() const noexcept { return _kind; }
    [[nodiscard]] const std::string& field() const noexcept { return _field; }

  private:
    Kind _kind;
    std::string _field;
};

class BackendError: public Error
{
  public:
    enum class Kind
    {
        Network,
        RateLimited,
        MalformedResponse,
        Timeout,
    };

    BackendError(Kind kind, bool retryable, const std::string& detail):
        Error(detail), _kind(kind), _retryable(retryable || kind == Kind::RateLimited)
    {
    }

    [[nodiscard]] Kind kind() const noexcept { return _kind; }
    [[nodiscard]] bool retryable() const noexcept { return _retryable; }

  private:
    Kind _kind;
    bool _retryable;
};

[[nodiscard]] std::string to_string(BackendError::Kind kind);

/// No parsable answer in the round the verdict is taken from.
class AllAbstained: public Error
{
  public:
    AllAbstained(): Error("every agent abstained") {}
};

class LeaderUnparseable: public Error
{
  public:
    using Error::Error;
};

class JudgeUnparseable: public Error
{
  public:
    using Error::Error;
};

class StatsError: public Error
{
  public:
    enum class Kind
    {
        EmptySample,
        ZeroVariance,
        AllZeroDiffs,
        TooFewGroups,
        EmptyCorpus,
        LengthMismatch,
        InvalidArgument,
    };

    StatsError(Kind kind, const std::string& detail): Error(detail), _kind(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return _kind; }

  private:
    Kind _kind;
};

class DatasetError: public Error
{
  public:
    enum class Kind
    {
        MalformedRecord,
        UnknownLabel,
        ClassTooSmall,
        Io,
    };

    DatasetError(Kind kind, std::size_t line, const std::string& detail):
        Error(line ? "line " + std::to_string(line) + ": " + detail : detail), _kind(kind), _line(line)
    {
    }

    [[nodiscard]] Kind kind() const noexcept { return _kind; }
    [[nodiscard]] std::size_t line() const noexcept { return _line; }

  private:
    Kind _kind;
    std::size_t _line;
};

class InsufficientDistinct: public Error
{
  public:
    using Error::Error;
};

class ConfigError: public Error
{
  public:
    using Error::Error;
};

class InvalidGrid: public ConfigError
{
  public:
    using ConfigError::ConfigError;
};

class NoRecords: public Error
{
  public:
    using Error::Error;
};

} // namespace teamlab
