#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stealthsim {

/// Misconfiguration detected while building or driving a simulation
/// (scheduling into the past, zero-sized packets, bad parameters).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A protocol endpoint received something that cannot happen under the
/// honest+duplicating model, e.g. an ACK for data never sent.
class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a closed-form prediction.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based, 0 when not tied to a line
  std::string key;
  std::string message;
};

/// Scenario text failed validation. Carries every diagnostic found, not
/// just the first.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(std::vector<Diagnostic> diags);
  [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
  std::vector<Diagnostic> diags_;
};

/// A fatal error raised inside event dispatch, annotated with the event
/// that was running.
class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace stealthsim
