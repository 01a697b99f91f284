#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qal {

/// Category of a failure; each maps to a distinct CLI exit status.
enum class ErrorKind : int {
    contract = 10,
    degenerate_state = 11,
    parameter = 12,
    configuration = 13,
    numerical_blowup = 14,
    singular_system = 15,
    classification_unavailable = 16,
    io = 17,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
};

struct ContractError : Error {
    explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

struct DegenerateStateError : Error {
    explicit DegenerateStateError(const std::string& what)
        : Error(ErrorKind::degenerate_state, what) {}
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

/// Configuration problem attributable to a single named key.
class ConfigError : public Error {
  public:
    ConfigError(std::string key, const std::string& what);
    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

class NumericalBlowupError : public Error {
  public:
    explicit NumericalBlowupError(std::int64_t step_index);
    std::int64_t step_index() const noexcept { return step_index_; }

  private:
    std::int64_t step_index_;
};

struct SingularSystemError : Error {
    explicit SingularSystemError(const std::string& what)
        : Error(ErrorKind::singular_system, what) {}
};

struct ClassificationUnavailableError : Error {
    explicit ClassificationUnavailableError(const std::string& what)
        : Error(ErrorKind::classification_unavailable, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace qal
