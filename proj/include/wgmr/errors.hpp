#pragma once

#include <stdexcept>
#include <string>

namespace wgmr {

// Invalid physical input (out-of-window wavelength, nonpositive rate, ...).
// The message names the violated bound.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// A numerical procedure failed to converge or became singular.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// An API precondition was violated (unsorted stream, missing labels, ...).
class ContractError : public std::logic_error {
public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Requested mode numbers above the supported desk-scale range.
class UnsupportedScaleError : public std::domain_error {
public:
  explicit UnsupportedScaleError(const std::string& msg) : std::domain_error(msg) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace wgmr
