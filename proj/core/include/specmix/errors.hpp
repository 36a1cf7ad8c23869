#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specmix {

/// Malformed or inconsistent user input (bad graph, bad table, bad flag).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// An enumeration would exceed a configured cap.  Carries the limit that
/// would be required so callers can report how to raise it.
class CapExceededError : public std::runtime_error {
 public:
  CapExceededError(const std::string& what, std::uint64_t required)
      : std::runtime_error(what + " (required cap: " + std::to_string(required) + ")"),
        required_cap(required) {}
  std::uint64_t required_cap;
};

/// Pinning with empty conditional support.
class InvalidPinningError : public std::runtime_error {
 public:
  explicit InvalidPinningError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical preconditions violated (asymmetry, detailed-balance residual,
/// non-convergence, non-ergodic kernel).
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Walk requested on a degenerate state space (fewer than 2 free vertices).
class DegenerateWalkError : public std::runtime_error {
 public:
  explicit DegenerateWalkError(const std::string& what) : std::runtime_error(what) {}
};

struct Caps {
  std::uint64_t max_configs = 1u << 20;        // full state-space enumeration
  std::uint64_t max_pinnings_per_level = 1000000;
  std::uint64_t max_bases = 100000;
  std::uint64_t max_subsets_exact = 1000000;   // shattering: exact vs Monte Carlo
  std::uint64_t max_power_states = 4096;       // transition-matrix powering

  /// Defaults overridden by SPECMIX_MAX_CONFIGS, SPECMIX_MAX_PINNINGS,
  /// SPECMIX_MAX_BASES, SPECMIX_MAX_SUBSETS, SPECMIX_MAX_POWER_STATES.
  static Caps from_env();
};

}  // namespace specmix
