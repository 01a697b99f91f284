#include "qal/error.hpp"

#include <utility>

namespace qal {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::contract: return "contract violation";
        case ErrorKind::degenerate_state: return "degenerate state";
        case ErrorKind::parameter: return "parameter error";
        case ErrorKind::configuration: return "configuration error";
        case ErrorKind::numerical_blowup: return "numerical blowup";
        case ErrorKind::singular_system: return "singular system";
        case ErrorKind::classification_unavailable: return "classification unavailable";
        case ErrorKind::io: return "i/o error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

ConfigError::ConfigError(std::string key, const std::string& what)
    : Error(ErrorKind::configuration, key + ": " + what), key_(std::move(key)) {}

NumericalBlowupError::NumericalBlowupError(std::int64_t step_index)
    : Error(ErrorKind::numerical_blowup,
            "non-finite values after step " + std::to_string(step_index)),
      step_index_(step_index) {}

}  // namespace qal
