#ifndef MCF_ERRORS_HPP
#define MCF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcf {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed potential text; carries the byte offset of the failure.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t position)
        : Error(msg + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Identifier other than S/pi/e or a function outside the supported set.
class UnknownIdentifierError : public Error {
public:
    UnknownIdentifierError(const std::string& name, std::size_t position)
        : Error("unknown identifier '" + name + "' (at offset " +
                std::to_string(position) + ")") {}
};

/// Evaluation outside a function's domain (log of nonpositive value, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation produced a non-finite value from finite, in-domain inputs.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Metric coefficient eta^2 or mu^2 is not positive at the requested radius.
class NotPositiveError : public Error {
public:
    using Error::Error;
};

class InvalidInitialRadiusError : public Error {
public:
    using Error::Error;
};

class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// classify() requires a trajectory with status Collapsed.
class NotCollapsedError : public Error {
public:
    using Error::Error;
};

/// Potential violates g_S(0) > 0, so asymptotic constants do not exist.
class InvalidPotentialError : public Error {
public:
    using Error::Error;
};

/// H >= 0 encountered where the computation needs H < 0.
class StallError : public Error {
public:
    using Error::Error;
};

} // namespace mcf

#endif // MCF_ERRORS_HPP
