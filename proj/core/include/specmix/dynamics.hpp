#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specmix/gibbs.hpp"
#include "specmix/levels.hpp"

namespace specmix {

/// Single-site heat-bath chain on the support configurations.
WalkKernel glauber_kernel(const SpinSystem& system, const Caps& caps = {});

/// Heat-bath dynamics resampling a uniform block of the given size.
WalkKernel block_kernel(const SpinSystem& system, int block_size, const Caps& caps = {});

/// (P + I) / 2.
WalkKernel lazy(const WalkKernel& kernel);

/// Pf evaluated entrywise.
std::vector<double> apply_kernel(const WalkKernel& kernel, const std::vector<double>& f);

struct MixingReport {
  double gamma = 0.0;
  double lambda_star = 0.0;
  double t_relax = 0.0;                   // 1 / (1 - lambda_star)
  double mu_star = 0.0;                   // min stationary mass
  double psd_min_eigenvalue = 0.0;
  std::vector<std::pair<double, long>> t_mix_exact;  // (eps, exact mixing time)
  double bound_t_mix = 0.0;               // (n / gamma) log(1 / mu_star)
  double bound_t_relax = 0.0;             // n / gamma, evaluated verbatim
  double bound_t_relax_standard = 0.0;    // 1 / gamma, reported alongside
  int sites = 0;

  long t_mix(double eps) const;
  std::string to_json() const;
};

/// Exact mixing times by transition-matrix powering (repeated squaring with
/// row renormalization); worst-case start, TV as half L1.
MixingReport mixing_report(const WalkKernel& kernel, int sites,
                           const std::vector<double>& eps_list, const Caps& caps = {});

struct Trajectory {
  std::uint64_t seed = 0;
  int n = 0;
  long steps = 0;
  std::vector<std::uint32_t> states;       // X_0 .. X_steps
  std::map<std::uint32_t, long> counts;    // over X_1 .. X_steps

  double occupancy() const;                // mean occupied fraction over counts
  std::string to_csv() const;
};

/// Implicit-state hard-core Glauber simulation from the empty configuration.
Trajectory simulate_glauber(const Graph& graph, const Rat& activity, long steps,
                            std::uint64_t seed);

/// Half L1 between empirical counts and the exact table.
double empirical_tv(const Trajectory& trajectory, const SpinSystem& system);

struct ShatteringReport {
  int n = 0;
  int block_size = 0;
  double alpha = 0.0;
  int max_degree = 0;
  bool exact = true;
  std::uint64_t samples = 0;                      // Monte Carlo only
  std::vector<std::vector<double>> prob;          // [vertex][k-1], k = 1..n
  std::vector<std::vector<double>> ci_halfwidth;  // Monte Carlo 95% CI
  std::vector<double> bound;                      // alpha (6 Delta alpha)^{k-1}
  bool all_within_bound = true;
  std::vector<std::string> violations;

  std::string to_json() const;
};

/// Distribution of the component size containing each vertex when a uniform
/// block of the given size is chosen; exact enumeration when the subset count
/// fits the cap, Monte Carlo with 95% confidence bands otherwise.  Monte
/// Carlo sampling shards across `threads` workers on streams Rng(seed, w);
/// counts merge in worker order, so results are deterministic given
/// (seed, threads).
ShatteringReport shattering_check(const Graph& graph, int block_size, const Caps& caps = {},
                                  std::uint64_t seed = 0, std::uint64_t mc_samples = 200000,
                                  int threads = 1);

/// Ent[f] = E[f log f] - E[f] log E[f]; f >= 0, 0 log 0 = 0.
double entropy(const std::vector<double>& dist, const std::vector<double>& f);

struct EntropyRatio {
  double ent = 0.0;
  double site_sum = 0.0;  // sum over vertices of expected conditional entropy
  double ratio = 1.0;
  bool degenerate = false;  // zero denominator, ratio reported as 1
};

/// Ent(f) against the sum of expected single-site conditional entropies.
EntropyRatio entropy_tensorization_ratio(const SpinSystem& system, const std::vector<double>& f);

struct EntropyProbeReport {
  double max_ratio = 1.0;
  int probes = 0;
  int degenerate = 0;
  std::vector<double> single_site_ratios;  // indicator + 0.1 probes
  double bound_t_mix = 0.0;                // max_ratio * n * log log(1 / mu_star)
};

/// Probe battery: 32 constants, 32 single-site indicators (+0.1), 32
/// exponentials of random linear functions.
EntropyProbeReport entropy_probe_sweep(const SpinSystem& system, std::uint64_t seed);

}  // namespace specmix
