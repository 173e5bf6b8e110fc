#pragma once

#include <stdexcept>
#include <string>

namespace ecado {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class NotSpdError : public Error {
public:
    using Error::Error;
};

class CapabilityError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Raised when the backtracking floor is hit; `condition` names what still failed.
class FloorReachedError : public Error {
public:
    FloorReachedError(const std::string& condition, double dt)
        : Error("time step floor reached at dt=" + std::to_string(dt) + " (" + condition + ")"),
          condition_(condition), dt_(dt) {}
    const std::string& condition() const { return condition_; }
    double dt() const { return dt_; }

private:
    std::string condition_;
    double dt_;
};

// Schema problems in experiment specs; `key` is the offending JSON key.
class SchemaError : public ConfigError {
public:
    SchemaError(const std::string& key, const std::string& why)
        : ConfigError("schema error at key '" + key + "': " + why), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace ecado
