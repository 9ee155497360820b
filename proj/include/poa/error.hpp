#pragma once

#include <stdexcept>
#include <string>

namespace poa {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An identifier (relay, download) could not be resolved.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or input document. Carries the offending field path.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace poa
