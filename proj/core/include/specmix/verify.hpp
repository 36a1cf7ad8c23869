#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specmix/dynamics.hpp"
#include "specmix/gibbs.hpp"
#include "specmix/influence.hpp"
#include "specmix/levels.hpp"
#include "specmix/matroid.hpp"

namespace specmix {

/// One named numerical check on one instance slice.  For identities the
/// margin is the worst deviation (pass: margin <= tolerance); for
/// inequalities the margin is lhs - rhs (pass: margin >= -tolerance).
struct CheckResult {
  std::string name;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string notes;
};

struct Tolerances {
  double identity = 1e-10;
  double identity_tight = 1e-12;
  double inequality = 1e-9;
  double spectrum = 1e-8;
};

struct SuiteReport {
  std::string descriptor;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  std::vector<CheckResult> results;  // sorted by (name, instance)
  std::string summary_json;          // headline quantities of the instance

  bool all_passed() const;  // skipped checks do not fail
  int failed() const;
  int skipped() const;
  std::string to_json() const;
};

/// Runs every levels/influence/dynamics invariant on one spin system.
SuiteReport run_spin_suite(const SpinSystem& system, std::uint64_t seed,
                           const Caps& caps = {}, const std::string& descriptor = "");

/// Runs the matroid battery: axioms, walk gaps, gap recursion, link
/// identities, reliability cross-check.
SuiteReport run_matroid_suite(const Matroid& matroid, std::uint64_t seed,
                              const Caps& caps = {}, const std::string& descriptor = "");

/// Every check name a spin suite emits, in registry order.
std::vector<std::string> spin_check_registry();
std::vector<std::string> matroid_check_registry();

struct SweepConfig {
  struct SpinInstance {
    std::string descriptor;
    std::string graph_json;
    Rat lambda;
  };
  struct MatroidInstance {
    std::string descriptor;
    std::string spec;
  };
  std::uint64_t seed = 1;
  std::vector<SpinInstance> spins;
  std::vector<MatroidInstance> matroids;

  /// {"seed":int, "spin":[{"family":"path","n":[2,5],"lambda":["1","2"]},
  ///  {"family":"er","n":5,"p":0.5,"count":10,"lambda":["1"]},
  ///  {"graph":"cycle5","lambda":["1/2"]}], "matroids":["graphic-K4",{...}]}
  static SweepConfig from_json(const std::string& text);
};

struct SweepResult {
  std::vector<SuiteReport> reports;
  int total = 0;
  int passed = 0;
  std::vector<std::string> failed_instances;
  /// Full serialization of every failing instance, for replay.
  std::vector<std::string> failure_dumps;

  std::string to_json() const;
};

SweepResult sweep(const SweepConfig& config, const Caps& caps = {});

}  // namespace specmix
