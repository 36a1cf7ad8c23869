#pragma once

#include <string>
#include <vector>

#include "specmix/gibbs.hpp"
#include "specmix/numerics.hpp"

namespace specmix {

/// Pairwise influence under a pinning, over the free vertices.  Diagonal
/// entries are exactly 1; frozen vertices contribute no row/column.
struct InfluenceMatrix {
  Pinning pinning;
  std::vector<int> free_vertices;
  DenseMatrix entries;
  bool degenerate = false;  // no free vertices
};

/// Exact-rational mirror of InfluenceMatrix/covariance entries.
using RatMatrix = std::vector<std::vector<Rat>>;

InfluenceMatrix influence_matrix(const SpinSystem& system, const Pinning& tau);
RatMatrix influence_matrix_exact(const SpinSystem& system, const Pinning& tau);

/// Covariance of the occupation indicators over free vertices.
DenseMatrix covariance_matrix(const SpinSystem& system, const Pinning& tau);
RatMatrix covariance_matrix_exact(const SpinSystem& system, const Pinning& tau);

/// Conditional one-marginals of the free vertices, in free_vertices order.
std::vector<Rat> free_marginals_exact(const SpinSystem& system, const Pinning& tau);

/// Real spectrum of the influence matrix via the symmetrized conjugation
/// D^{-1/2} Cov D^{-1/2}, D(i,i) = Pr[sigma(i)=1] Pr[sigma(i)=0].
Spectrum influence_spectrum(const SpinSystem& system, const Pinning& tau);

struct PinningEigenvalue {
  Pinning pinning;
  double lambda_max = 1.0;
  int free_count = 0;
};

struct SIReport {
  double eta = 0.0;  // max over pinnings with >= 2 free vertices of lambda_max - 1
  double b = 1.0;    // minimum positive conditional marginal
  Pinning witness_pinning;
  std::vector<PinningEigenvalue> per_pinning;  // all valid pinnings, by level then key
  std::vector<double> per_level_max;           // lambda_max per level (1 when vacuous)

  std::string to_json() const;
};

/// Sweeps every valid pinning; pinnings with fewer than 2 free vertices are
/// recorded but excluded from the maximum.
SIReport spectral_independence(const SpinSystem& system, const Caps& caps = {});

}  // namespace specmix
