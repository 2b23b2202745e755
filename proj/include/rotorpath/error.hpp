#ifndef ROTORPATH_ERROR_HPP
#define ROTORPATH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rotorpath {

/// Invalid user-facing configuration. `key()` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A computation produced non-finite or otherwise unusable numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Programming error: a function was called outside its documented domain.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rotorpath

#endif
