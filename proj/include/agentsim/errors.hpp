#pragma once

#include <stdexcept>
#include <string>

namespace agentsim {

/// Duplicate entity registration or registration after the run started.
class RegistrationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Event time outside the run bounds, or scheduling from outside a handler.
class SchedulingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Cross-entity event requested with a delay below the lookahead.
class CausalityError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Handler name not registered at the target entity.
class DispatchError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Model reply that does not contain the expected answer format.
class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A scenario received an answer it cannot act on (e.g. a "minimum" that is not in the array).
class ProtocolError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Transport or protocol failure talking to a chat endpoint.
class BackendError : public std::runtime_error
{
public:
    BackendError(int status, std::string body, const std::string& what)
        : std::runtime_error(what), status_(status), body_(std::move(body))
    {
    }

    int status() const noexcept { return status_; }
    const std::string& body() const noexcept { return body_; }

private:
    int status_;
    std::string body_;
};

} // namespace agentsim
