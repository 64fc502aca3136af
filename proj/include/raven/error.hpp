#pragma once

#include <stdexcept>
#include <string>

namespace raven {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A non-finite reward was fed to a statistics accumulator.
class InvalidObservation : public Error {
public:
    using Error::Error;
};

/// A step index outside the valid range was supplied.
class InvalidStep : public Error {
public:
    using Error::Error;
};

/// A request referred to an arm that is not selectable (inactive, out of range,
/// or the active set is empty).
class InvalidArm : public Error {
public:
    using Error::Error;
};

/// Bad configuration. `key()` names the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Regret reduction is undefined for a non-positive baseline.
class UndefinedReduction : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace raven
