#pragma once

#include <map>
#include <memory>
#include <vector>

#include "specmix/errors.hpp"
#include "specmix/numerics.hpp"
#include "specmix/rational.hpp"

namespace specmix {

/// A face is a sorted list of ground-element ids.
using Face = std::vector<int>;

std::string face_to_string(const Face& face);

/// Weighted pure simplicial complex given by its top faces (all of size r)
/// and a probability weight per top face.  Level k carries the faces of size
/// k with positive mass mu(tau) = sum of weights of tops containing tau and
/// the distribution pi_k(tau) = mu(tau) / C(r, k).
///
/// Binary spin systems embed with ground elements (vertex, spin) -> 2v+s and
/// tops the support configurations; matroids embed with ground E and tops the
/// bases, uniformly weighted.
class FaceComplex {
 public:
  struct Level {
    int k = 0;
    std::vector<Face> faces;  // sorted lexicographically
    std::vector<Rat> mu;
    std::vector<Rat> pi;
    std::vector<double> mu_d;
    std::vector<double> pi_d;
    std::map<Face, int> index;

    int find(const Face& face) const {
      auto it = index.find(face);
      return it == index.end() ? -1 : it->second;
    }
    int size() const { return static_cast<int>(faces.size()); }
  };

  FaceComplex(int ground_size, std::vector<Face> tops, std::vector<Rat> weights,
              const Caps& caps = {});

  int ground_size() const { return ground_size_; }
  int rank() const { return rank_; }
  const Level& level(int k) const;

  /// P_k -> P_{k-1}: remove a uniform element.
  const DenseMatrix& down_kernel(int k) const;
  /// P_k -> P_{k+1}: add an element with probability mu(tau+a)/((r-k) mu(tau)).
  const DenseMatrix& up_kernel(int k) const;

  DenseMatrix up_down(int k) const;                // P^up_k P^down_{k+1}
  DenseMatrix down_up(int k) const;                // P^down_k P^up_{k-1}
  DenseMatrix down_up_multi(int i, int j) const;   // down i->j, then up j->i

  struct LocalWalk {
    Face pinning;
    std::vector<int> states;  // ground elements a with mu(S+a) > 0
    DenseMatrix kernel;
    std::vector<double> stationary;
    std::vector<Rat> stationary_exact;
    int find_state(int element) const;
  };
  /// Local walk at a face S with |S| <= r-2.
  LocalWalk local_walk(const Face& s) const;

  struct LinkLevel {
    std::vector<Face> faces;  // disjoint from the pinning
    std::vector<double> pi;
    std::vector<Rat> pi_exact;
    std::map<Face, int> index;
  };
  /// pi_{S,j}: the j-level conditional distribution above the face S.
  LinkLevel link_level(const Face& s, int j) const;

  /// f_at_k = up_kernel(k) * f_at_k_plus_1.
  std::vector<double> project(int k, const std::vector<double>& f_upper) const;

  Rat mu_exact(const Face& s) const;

 private:
  int ground_size_;
  int rank_;
  std::vector<Face> tops_;
  std::vector<Rat> weights_;
  std::vector<Level> levels_;
  mutable std::map<int, DenseMatrix> down_cache_;
  mutable std::map<int, DenseMatrix> up_cache_;
};

}  // namespace specmix
