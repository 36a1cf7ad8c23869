#pragma once

#include <memory>
#include <string>
#include <vector>

#include "specmix/complex.hpp"
#include "specmix/graph.hpp"
#include "specmix/levels.hpp"
#include "specmix/rational.hpp"

namespace specmix {

/// Matroid given by an independence oracle over ground elements 0..n-1.
/// Value type; implementations are shared immutable state.
class Matroid {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual int ground_size() const = 0;
    virtual bool independent(const Face& sorted_set) const = 0;
    virtual std::string kind() const = 0;
    virtual std::string describe() const = 0;
  };

  explicit Matroid(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  int ground_size() const { return impl_->ground_size(); }
  bool independent(const Face& sorted_set) const { return impl_->independent(sorted_set); }
  std::string kind() const { return impl_->kind(); }
  std::string describe() const { return impl_->describe(); }

 private:
  std::shared_ptr<const Impl> impl_;
};

// constructors
Matroid uniform_matroid(int n, int r);
Matroid graphic_matroid(const Graph& graph);
Matroid linear_matroid_rational(const std::vector<std::vector<Rat>>& vectors);
Matroid linear_matroid_gf(std::int64_t p, const std::vector<std::vector<std::int64_t>>& vectors);
/// Transversal matroid of a bipartite graph: ground = left vertices,
/// independent = matchable subsets.  edges are (left, right) pairs.
Matroid transversal_matroid(int left, int right, const std::vector<std::pair<int, int>>& edges);
/// Oracle = subsets of the listed bases.  With validate, the equal-size and
/// exchange requirements are checked at construction and violations throw
/// InputError; without it an axioms_check can report the witness instead.
Matroid explicit_matroid(int ground, const std::vector<Face>& bases, bool validate = true);

// minors
Matroid dual(const Matroid& m);
Matroid restrict_to(const Matroid& m, const Face& s);
/// Contraction by an independent set; throws InputError otherwise.
Matroid contract(const Matroid& m, const Face& s);
Matroid truncate(const Matroid& m, int k);

/// Rank of a subset via greedy oracle calls.
int rank_of(const Matroid& m, const Face& subset);
int rank(const Matroid& m);

struct BasesSet {
  std::vector<Face> bases;  // sorted lexicographically
  int rank = 0;
};
/// All bases by lexicographic oracle-guided search.
BasesSet bases(const Matroid& m, const Caps& caps = {});

struct AxiomsReport {
  bool downward_closed = true;
  bool exchange = true;
  bool bases_equal_size = true;
  std::string witness;  // first violation found
  bool pass() const { return downward_closed && exchange && bases_equal_size; }
};
/// Exhaustive verification of downward closure and the exchange property
/// over all subset pairs; requires 2^n within the configuration cap.
AxiomsReport axioms_check(const Matroid& m, const Caps& caps = {});

/// Remove a uniform element of the current basis, add a uniform valid
/// replacement; symmetric with uniform stationary distribution.
WalkKernel bases_exchange_kernel(const Matroid& m, const Caps& caps = {});

/// Uniform-over-bases face complex (levels = independent sets by size).
FaceComplex matroid_complex(const Matroid& m, const Caps& caps = {});

struct MatroidLocalWalk {
  Face pinning;
  std::vector<int> elements;
  WalkKernel kernel;
};
/// Local walk at an independent set S with |S| <= rank-2; transitions are
/// proportional to the number of bases containing S plus the two elements.
MatroidLocalWalk matroid_local_walk(const Matroid& m, const Face& s, const Caps& caps = {});

struct Rank2Structure {
  std::vector<int> loops;               // dependent singletons, excluded from the walk
  std::vector<std::vector<int>> parts;  // maximal sets of pairwise dependent elements
  double lambda2 = 0.0;                 // second eigenvalue of the local walk
  bool multipartite_ok = true;
  std::string witness;
};
/// Structure of a rank-2 matroid: complete multipartite basis graph plus
/// isolated loop elements, verified edge by edge.
Rank2Structure rank2_structure(const Matroid& m, const Caps& caps = {});

struct TrickleDownLevel {
  int level = 0;
  double gamma_min = 0.0;
  Face witness;
};

struct TrickleDownReport {
  std::vector<TrickleDownLevel> levels;  // |S| = 0 .. rank-2
  bool recursion_ok = true;   // gamma_i >= 2 - 1/gamma_{i+1} - tol per level
  bool final_ok = true;       // gamma(Q_S) >= 1 - tol for every S
  double worst_recursion_margin = 0.0;
  double worst_final_margin = 0.0;
  bool aborted = false;       // reducible link encountered
  Face reducible_witness;
};
/// Certifies the gap recursion level by level on measured local-walk gaps.
TrickleDownReport trickle_down_certify(const Matroid& m, const Caps& caps = {},
                                       double tol = 1e-9);

struct ReliabilityReport {
  Rat dual_formula = 0;       // sum over dual independent-set counts
  Rat direct = 0;             // 2^n enumeration; equals dual_formula on match
  bool direct_available = true;
  bool match = true;          // exact rational comparison

  std::string to_json() const;
};
/// Probability that a p-random subset of the ground set contains a basis.
ReliabilityReport reliability(const Matroid& m, const Rat& p, const Caps& caps = {});

/// Single bases-exchange trajectory; start basis is the lexicographically
/// smallest one.
struct MatroidTrajectory {
  std::uint64_t seed = 0;
  long steps = 0;
  std::vector<Face> states;  // B_0 .. B_steps
  std::map<Face, long> counts;
};
MatroidTrajectory simulate_bases_exchange(const Matroid& m, long steps, std::uint64_t seed,
                                          const Caps& caps = {});
double empirical_tv_uniform(const MatroidTrajectory& trajectory, std::size_t num_bases);

/// Parses {"kind": "uniform|graphic|linear|transversal|explicit|minor", ...}
/// or a builtin name ("graphic-triangle", "graphic-K4", "uniform-4-2",
/// "fano", "transversal-demo", "explicit-bad").
Matroid matroid_from_spec(const std::string& text);

}  // namespace specmix
