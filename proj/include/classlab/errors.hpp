#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace classlab {

enum class ErrorCode
{
    not_found,
    validation,
    unauthorized,
    conflict,
    internal,
};

std::string_view to_string(ErrorCode code);

// Base of every error raised by the library. The code decides how the
// error is reported over HTTP and from the command line.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, std::string const& message,
          std::optional<std::string> field = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::string> const& field() const noexcept { return field_; }

  private:
    ErrorCode code_;
    std::optional<std::string> field_;
};

class NotFoundError : public Error
{
  public:
    explicit NotFoundError(std::string const& message)
        : Error(ErrorCode::not_found, message)
    {
    }
};

class ValidationError : public Error
{
  public:
    explicit ValidationError(std::string const& message,
                             std::optional<std::string> field = std::nullopt)
        : Error(ErrorCode::validation, message, std::move(field))
    {
    }
};

class UnauthorizedError : public Error
{
  public:
    explicit UnauthorizedError(std::string const& message)
        : Error(ErrorCode::unauthorized, message)
    {
    }
};

class ConflictError : public Error
{
  public:
    explicit ConflictError(std::string const& message)
        : Error(ErrorCode::conflict, message)
    {
    }
};

// Persistence failed; the operation did not take effect and may be retried.
class StorageError : public Error
{
  public:
    explicit StorageError(std::string const& message)
        : Error(ErrorCode::internal, message)
    {
    }

    bool retryable() const noexcept { return true; }
};

}  // namespace classlab
