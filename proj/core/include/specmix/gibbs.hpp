#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "specmix/errors.hpp"
#include "specmix/graph.hpp"
#include "specmix/rational.hpp"

namespace specmix {

/// Full spin assignment, bit v = spin of vertex v.
struct SpinConfig {
  std::uint32_t mask = 0;
  int n = 0;

  int spin(int v) const { return (mask >> v) & 1; }
  std::string bitstring() const {
    std::string s(n, '0');
    for (int v = 0; v < n; ++v) s[v] = spin(v) ? '1' : '0';
    return s;
  }
  static SpinConfig from_bitstring(const std::string& s);
  bool operator==(const SpinConfig&) const = default;
};

/// Lexicographic order by vertex index with spin 0 < 1.
inline bool config_lex_less(std::uint32_t a, std::uint32_t b) {
  std::uint32_t diff = a ^ b;
  if (diff == 0) return false;
  int v = __builtin_ctz(diff);
  return ((a >> v) & 1u) == 0;
}

/// Partial spin assignment tau on a vertex set S, keys stored sorted.
class Pinning {
 public:
  Pinning() = default;
  explicit Pinning(std::vector<std::pair<int, int>> assignments);

  int level() const { return static_cast<int>(assignments_.size()); }
  const std::vector<std::pair<int, int>>& assignments() const { return assignments_; }
  std::uint32_t vertex_mask() const { return vertex_mask_; }
  std::uint32_t spin_bits() const { return spin_bits_; }

  bool pins(int v) const { return (vertex_mask_ >> v) & 1u; }
  int spin_at(int v) const { return (spin_bits_ >> v) & 1; }
  bool matches(std::uint32_t config_mask) const {
    return (config_mask & vertex_mask_) == spin_bits_;
  }

  Pinning with(int v, int s) const;
  /// Union of two pinnings; throws InputError on conflicting spins.
  Pinning merged(const Pinning& other) const;

  std::string to_string() const;  // "0:1,2:0"; "" for the empty pinning

  bool operator==(const Pinning&) const = default;
  bool operator<(const Pinning& other) const {
    return assignments_ < other.assignments_;
  }

 private:
  std::vector<std::pair<int, int>> assignments_;  // sorted by vertex
  std::uint32_t vertex_mask_ = 0;
  std::uint32_t spin_bits_ = 0;
};

/// Gibbs distribution over {0,1}^V given by an explicit table.  Probabilities
/// are exact rationals with cached double mirrors; support configs are
/// distinct, positive-probability, and sorted lexicographically.
class SpinSystem {
 public:
  SpinSystem(Graph graph, std::vector<std::uint32_t> support_masks,
             std::vector<Rat> weights, Rat partition_value);

  const Graph& graph() const { return graph_; }
  int n() const { return graph_.n(); }
  int size() const { return static_cast<int>(support_.size()); }

  const std::vector<std::uint32_t>& support() const { return support_; }
  SpinConfig config(int i) const { return SpinConfig{support_[i], n()}; }
  const Rat& prob(int i) const { return probs_[i]; }
  double prob_d(int i) const { return probs_d_[i]; }
  const std::vector<double>& probs_d() const { return probs_d_; }
  const Rat& partition_value() const { return partition_value_; }

  /// Support index of a configuration mask, or -1.
  int index_of(std::uint32_t mask) const;

  bool is_valid_pinning(const Pinning& tau) const;
  /// mu(tau): total mass of configurations extending tau.
  Rat mu(const Pinning& tau) const;

  std::string to_csv() const;

 private:
  Graph graph_;
  std::vector<std::uint32_t> support_;
  std::vector<Rat> probs_;
  std::vector<double> probs_d_;
  Rat partition_value_;
  std::unordered_map<std::uint32_t, int> index_;
};

/// Hard-core model: support = independent sets, weight(sigma) = lambda^|sigma|.
SpinSystem build_hardcore(const Graph& graph, const Rat& activity,
                          const Caps& caps = {});

/// Normalizes a weighted table; zero-weight rows are dropped from support.
SpinSystem load_table(const Graph& graph,
                      const std::vector<std::pair<SpinConfig, Rat>>& records);

/// Rows "bitstring,weight" (weight rational or decimal).
SpinSystem load_table_csv(const std::string& csv);

/// Conditional system mu_tau on the same vertex set.
SpinSystem condition(const SpinSystem& system, const Pinning& tau);

double marginal(const SpinSystem& system, int vertex, int spin);
Rat marginal_exact(const SpinSystem& system, int vertex, int spin);

/// Conditional marginal mu_tau(sigma(vertex)=spin).
Rat cond_marginal_exact(const SpinSystem& system, const Pinning& tau, int vertex, int spin);
double cond_marginal(const SpinSystem& system, const Pinning& tau, int vertex, int spin);

/// All valid pinnings of size k, sorted.
std::vector<Pinning> enumerate_pinnings(const SpinSystem& system, int k,
                                        const Caps& caps = {});

struct FreeFrozenSplit {
  std::vector<int> free_vertices;               // both spins attainable
  std::vector<std::pair<int, int>> frozen;      // unpinned vertex -> forced spin
};
FreeFrozenSplit free_frozen_split(const SpinSystem& system, const Pinning& tau);

/// Minimum positive conditional marginal over all valid pinnings, vertices
/// and spins.  The reported value is the attained infimum; the definitional
/// bound is any b strictly below it.
Rat marginal_bound_exact(const SpinSystem& system, const Caps& caps = {});
double marginal_bound(const SpinSystem& system, const Caps& caps = {});

}  // namespace specmix
