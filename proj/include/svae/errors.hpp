#ifndef SVAE_ERRORS_HPP
#define SVAE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace svae {

// Caller passed arguments violating an operation's precondition.
class InvalidInputError : public std::invalid_argument {
public:
  explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Internal shape/width mismatch between wired components.
class ContractError : public std::logic_error {
public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Malformed input file.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid but inconsistent data (duplicate frames, overlaps...).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or other failures during optimization.
class TrainingError : public std::runtime_error {
public:
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad key, bad value, or unknown option in a run configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable, corrupt, or shape-mismatched checkpoint.
class CheckpointError : public std::runtime_error {
public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace svae

#endif
