#pragma once

#include <stdexcept>
#include <string>

namespace axp {

/// Malformed inputs: bad feature indices, values outside a domain,
/// inconsistent configs. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// An exhaustive procedure would exceed its configured size cap.
/// Maps to CLI exit code 3. Never downgraded to sampling.
class OracleCapError : public std::runtime_error {
 public:
  explicit OracleCapError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an operation's precondition (e.g. shrink on an
/// insufficient seed, scoring an incomplete explanation set).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace axp
