#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cascade {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed config text or a config that fails validation. `key()` names
/// the offending dotted key ("integrator.dt") when there is one.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Argument outside the domain of a closed-form function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A time integration produced non-finite values or unbounded growth.
class DivergedError : public Error {
public:
    DivergedError(std::uint64_t step, const std::string& what)
        : Error(what), step_(step) {}

    std::uint64_t step() const noexcept { return step_; }

private:
    std::uint64_t step_;
};

/// A regression or parameter fit could not be carried out on the given data.
class FitError : public Error {
public:
    using Error::Error;
};

} // namespace cascade
