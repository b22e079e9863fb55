#ifndef PUSHRANK_COMMON_HPP_
#define PUSHRANK_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace pushrank {

inline constexpr const char* kVersion = "0.1.0";

/*! \brief Invalid configuration value or malformed configuration file. */
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/*! \brief A documented precondition was violated by the caller. */
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

/*! \brief Tensor/vector dimensions do not line up. */
class ShapeError : public ContractError {
 public:
  explicit ShapeError(const std::string& msg) : ContractError(msg) {}
};

/*! \brief Non-finite values reached arithmetic that requires finite input. */
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/*! \brief Training cannot make progress (e.g. no usable pairs anywhere). */
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pushrank

#endif  // PUSHRANK_COMMON_HPP_
