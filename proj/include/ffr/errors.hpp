#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ffr
{

/// Input outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Structure the decomposition does not handle (repeated poles, pole collisions).
class UnsupportedStructureError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Object used before a required step ran (e.g. an unrouted device).
class StateError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// No latency sample is available yet for the requested probe time.
class NotReadyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The reserve constraints cannot be met by the available fleet.
class InfeasibleError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Integration diverged or another numerical breakdown occurred.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class IngestionError : public std::runtime_error
{
public:
    IngestionError(std::string const& what, std::size_t line)
        : std::runtime_error(
              line == 0 ? what : "line " + std::to_string(line) + ": " + what
          )
        , line_(line)
    {
    }

    /// 1-based line number in the source file, 0 when not line-specific.
    std::size_t line() const noexcept { return line_; }

    /// Same error with `prefix: ` prepended to the message.
    IngestionError with_context(std::string const& prefix) const
    {
        return IngestionError(prefix + ": " + what(), line_, Raw{});
    }

private:
    struct Raw
    {
    };

    IngestionError(std::string const& what, std::size_t line, Raw)
        : std::runtime_error(what)
        , line_(line)
    {
    }

    std::size_t line_;
};

} // namespace ffr
