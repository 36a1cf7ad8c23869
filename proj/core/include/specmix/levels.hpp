#pragma once

#include <memory>
#include <string>
#include <vector>

#include "specmix/complex.hpp"
#include "specmix/gibbs.hpp"
#include "specmix/numerics.hpp"

namespace specmix {

inline int pair_id(int vertex, int spin) { return 2 * vertex + spin; }

Face pinning_to_face(const Pinning& tau);
Pinning face_to_pinning(const Face& face);

/// Distribution pi_k over the valid pinnings of size k.
struct LevelSpace {
  int k = 0;
  std::vector<Pinning> elements;
  std::vector<double> pi;
  std::vector<Rat> pi_exact;
};

/// Row-stochastic walk matrix with indexed state spaces.  Square kernels
/// carry their stationary distribution and a reversibility flag.
struct WalkKernel {
  DenseMatrix entries;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<double> stationary;  // empty for rectangular kernels
  bool reversible = false;

  bool square() const { return entries.rows() == entries.cols(); }
  /// {"schema_version":1,"row_states":...} sidecar for the CSV export.
  std::string state_index_json() const;
};

Spectrum reversible_spectrum(const WalkKernel& kernel);
EigenDecomposition reversible_eigen(const WalkKernel& kernel);

struct LocalWalk {
  Pinning pinning;
  std::vector<std::pair<int, int>> states;  // (vertex, spin) with positive marginal
  WalkKernel kernel;                        // stationary = pi_{tau,1}
};

struct LevelGap {
  int k = 0;
  double gamma = 1.0;
  Pinning witness;
  bool reducible = false;  // some local walk at this level is reducible
};

/// Level hierarchy of a spin system: pinning distributions pi_k, up/down
/// operators, composite walks and local walks.  Built once per system.
class Levels {
 public:
  explicit Levels(const SpinSystem& system, const Caps& caps = {});

  int n() const { return system_->n(); }
  const SpinSystem& system() const { return *system_; }
  const FaceComplex& complex() const { return *complex_; }

  LevelSpace level_space(int k) const;

  WalkKernel down_operator(int k) const;             // P_k -> P_{k-1}
  WalkKernel up_operator(int k) const;               // P_k -> P_{k+1}
  WalkKernel up_down(int k) const;                   // square on level k
  WalkKernel down_up(int k) const;                   // square on level k
  WalkKernel down_up_multi(int i, int j) const;      // down to level j, back up

  /// Local walk at a valid pinning with at least two unpinned vertices
  /// (k <= n-2); throws DegenerateWalkError otherwise.
  LocalWalk local_walk(const Pinning& tau) const;

  /// Worst-case local gaps gamma_k for k = 0..n-2 with attaining pinnings.
  std::vector<LevelGap> local_gaps() const;

  /// Projection down one level: f_at_k(sigma) = sum_tau P_up(sigma,tau) f(tau).
  std::vector<double> project(int k, const std::vector<double>& f_upper) const;

  int pinning_index(int k, const Pinning& tau) const;

 private:
  std::shared_ptr<const SpinSystem> system_;
  std::shared_ptr<const FaceComplex> complex_;
  std::vector<double> stationary_of_level(int k) const;
  WalkKernel wrap_square(int k, DenseMatrix m) const;
};

double expectation(const std::vector<double>& dist, const std::vector<double>& f);

/// Variance under a distribution; evaluates both the centered-moment form and
/// the pair form and cross-checks them to 1e-12.
double variance(const std::vector<double>& dist, const std::vector<double>& f);

/// Dirichlet form (1/2) sum mu(x) P(x,y) (f(x)-f(y))^2 of a square kernel.
double dirichlet(const WalkKernel& kernel, const std::vector<double>& f);
double dirichlet(const DenseMatrix& kernel, const std::vector<double>& stationary,
                 const std::vector<double>& f);

}  // namespace specmix
