#include "classlab/errors.hpp"

namespace classlab {

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::not_found:
            return "not_found";
        case ErrorCode::validation:
            return "validation";
        case ErrorCode::unauthorized:
            return "unauthorized";
        case ErrorCode::conflict:
            return "conflict";
        case ErrorCode::internal:
            return "internal";
    }
    return "internal";
}

Error::Error(ErrorCode code, std::string const& message,
             std::optional<std::string> field)
    : std::runtime_error(message), code_(code), field_(std::move(field))
{
}

}  // namespace classlab
