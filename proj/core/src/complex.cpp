#include "specmix/complex.hpp"

#include <algorithm>
#include <set>

namespace specmix {

std::string face_to_string(const Face& face) {
  std::string s = "{";
  for (std::size_t i = 0; i < face.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(face[i]);
  }
  return s + "}";
}

namespace {

// All k-subsets of a sorted face, emitted in lexicographic order.
template <typename Fn>
void for_each_subset(const Face& face, int k, Fn&& fn) {
  int r = static_cast<int>(face.size());
  if (k > r) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  Face subset(k);
  while (true) {
    for (int i = 0; i < k; ++i) subset[i] = face[idx[i]];
    fn(subset);
    int i = k - 1;
    while (i >= 0 && idx[i] == r - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

FaceComplex::FaceComplex(int ground_size, std::vector<Face> tops, std::vector<Rat> weights,
                         const Caps& caps)
    : ground_size_(ground_size), tops_(std::move(tops)), weights_(std::move(weights)) {
  if (tops_.empty()) throw InputError("complex needs at least one top face");
  if (tops_.size() != weights_.size()) throw InputError("top/weight size mismatch");
  rank_ = static_cast<int>(tops_[0].size());
  Rat total = 0;
  for (std::size_t t = 0; t < tops_.size(); ++t) {
    if (static_cast<int>(tops_[t].size()) != rank_)
      throw InputError("top faces must share a common size");
    if (!std::is_sorted(tops_[t].begin(), tops_[t].end()))
      throw InputError("top faces must be sorted");
    if (weights_[t] <= 0) throw InputError("top weights must be positive");
    total += weights_[t];
  }
  if (total != 1) {  // normalize so that mu is a probability mass
    for (auto& w : weights_) w /= total;
  }

  levels_.resize(rank_ + 1);
  for (int k = 0; k <= rank_; ++k) {
    std::map<Face, Rat> acc;
    for (std::size_t t = 0; t < tops_.size(); ++t) {
      for_each_subset(tops_[t], k, [&](const Face& sub) { acc[sub] += weights_[t]; });
      if (acc.size() > caps.max_pinnings_per_level)
        throw CapExceededError("level " + std::to_string(k) + " exceeds the pinning cap",
                               acc.size());
    }
    Level& level = levels_[k];
    level.k = k;
    Rat choose = Rat(binomial(rank_, k));
    for (auto& [face, mu] : acc) {
      level.index[face] = static_cast<int>(level.faces.size());
      level.faces.push_back(face);
      level.mu.push_back(mu);
      level.pi.push_back(mu / choose);
      level.mu_d.push_back(to_double(level.mu.back()));
      level.pi_d.push_back(to_double(level.pi.back()));
    }
  }
}

const FaceComplex::Level& FaceComplex::level(int k) const {
  if (k < 0 || k > rank_) throw InputError("level out of range");
  return levels_[k];
}

const DenseMatrix& FaceComplex::down_kernel(int k) const {
  if (k < 1 || k > rank_) throw InputError("down kernel level out of range");
  auto it = down_cache_.find(k);
  if (it != down_cache_.end()) return it->second;
  const Level& from = levels_[k];
  const Level& to = levels_[k - 1];
  DenseMatrix m(from.size(), to.size());
  Face reduced;
  for (int i = 0; i < from.size(); ++i) {
    const Face& face = from.faces[i];
    for (int drop = 0; drop < k; ++drop) {
      reduced = face;
      reduced.erase(reduced.begin() + drop);
      int j = to.find(reduced);
      // every subface of a positive-mass face has positive mass
      m.at(i, j) += 1.0 / k;
    }
  }
  return down_cache_.emplace(k, std::move(m)).first->second;
}

const DenseMatrix& FaceComplex::up_kernel(int k) const {
  if (k < 0 || k >= rank_) throw InputError("up kernel level out of range");
  auto it = up_cache_.find(k);
  if (it != up_cache_.end()) return it->second;
  const Level& from = levels_[k];
  const Level& upper = levels_[k + 1];
  DenseMatrix m(from.size(), upper.size());
  Face reduced;
  for (int j = 0; j < upper.size(); ++j) {
    const Face& face = upper.faces[j];
    for (int drop = 0; drop < k + 1; ++drop) {
      reduced = face;
      reduced.erase(reduced.begin() + drop);
      int i = from.find(reduced);
      m.at(i, j) = upper.mu_d[j] / ((rank_ - k) * from.mu_d[i]);
    }
  }
  return up_cache_.emplace(k, std::move(m)).first->second;
}

DenseMatrix FaceComplex::up_down(int k) const {
  return multiply(up_kernel(k), down_kernel(k + 1));
}

DenseMatrix FaceComplex::down_up(int k) const {
  return multiply(down_kernel(k), up_kernel(k - 1));
}

DenseMatrix FaceComplex::down_up_multi(int i, int j) const {
  if (!(i > j && j >= 0 && i <= rank_)) throw InputError("down_up_multi needs i > j >= 0");
  DenseMatrix m = down_kernel(i);
  for (int k = i - 1; k > j; --k) m = multiply(m, down_kernel(k));
  for (int k = j; k < i; ++k) m = multiply(m, up_kernel(k));
  return m;
}

int FaceComplex::LocalWalk::find_state(int element) const {
  auto it = std::lower_bound(states.begin(), states.end(), element);
  if (it == states.end() || *it != element) return -1;
  return static_cast<int>(it - states.begin());
}

FaceComplex::LocalWalk FaceComplex::local_walk(const Face& s) const {
  int k = static_cast<int>(s.size());
  if (k > rank_ - 2)
    throw DegenerateWalkError("local walk needs a pinning of size <= rank-2");
  Rat mu_s = mu_exact(s);
  if (mu_s == 0) throw InvalidPinningError("local walk at a zero-mass face");

  // collect tops containing s; every reachable state and pair mass lives there
  std::map<int, Rat> single;      // mu(s + a)
  std::map<std::pair<int, int>, Rat> pair;  // mu(s + a + b), a < b
  for (std::size_t t = 0; t < tops_.size(); ++t) {
    if (!std::includes(tops_[t].begin(), tops_[t].end(), s.begin(), s.end())) continue;
    Face rest;
    std::set_difference(tops_[t].begin(), tops_[t].end(), s.begin(), s.end(),
                        std::back_inserter(rest));
    for (std::size_t a = 0; a < rest.size(); ++a) {
      single[rest[a]] += weights_[t];
      for (std::size_t b = a + 1; b < rest.size(); ++b)
        pair[{rest[a], rest[b]}] += weights_[t];
    }
  }

  LocalWalk walk;
  walk.pinning = s;
  for (const auto& [a, _] : single) walk.states.push_back(a);
  int m = static_cast<int>(walk.states.size());
  walk.kernel = DenseMatrix(m, m);
  walk.stationary.resize(m);
  walk.stationary_exact.resize(m);
  for (int i = 0; i < m; ++i) {
    Rat mu_sa = single[walk.states[i]];
    walk.stationary_exact[i] = mu_sa / ((rank_ - k) * mu_s);
    walk.stationary[i] = to_double(walk.stationary_exact[i]);
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      auto key = walk.states[i] < walk.states[j]
                     ? std::make_pair(walk.states[i], walk.states[j])
                     : std::make_pair(walk.states[j], walk.states[i]);
      auto it = pair.find(key);
      if (it == pair.end()) continue;
      walk.kernel.at(i, j) = to_double(it->second / ((rank_ - k - 1) * mu_sa));
    }
  }
  return walk;
}

FaceComplex::LinkLevel FaceComplex::link_level(const Face& s, int j) const {
  int k = static_cast<int>(s.size());
  if (j < 1 || k + j > rank_) throw InputError("link level out of range");
  Rat mu_s = mu_exact(s);
  if (mu_s == 0) throw InvalidPinningError("link of a zero-mass face");
  std::map<Face, Rat> acc;
  for (std::size_t t = 0; t < tops_.size(); ++t) {
    if (!std::includes(tops_[t].begin(), tops_[t].end(), s.begin(), s.end())) continue;
    Face rest;
    std::set_difference(tops_[t].begin(), tops_[t].end(), s.begin(), s.end(),
                        std::back_inserter(rest));
    for_each_subset(rest, j, [&](const Face& sub) { acc[sub] += weights_[t]; });
  }
  LinkLevel link;
  Rat norm = Rat(binomial(rank_ - k, j)) * mu_s;
  for (auto& [face, mu] : acc) {
    link.index[face] = static_cast<int>(link.faces.size());
    link.faces.push_back(face);
    link.pi_exact.push_back(mu / norm);
    link.pi.push_back(to_double(link.pi_exact.back()));
  }
  return link;
}

std::vector<double> FaceComplex::project(int k, const std::vector<double>& f_upper) const {
  return multiply(up_kernel(k), f_upper);
}

Rat FaceComplex::mu_exact(const Face& s) const {
  int k = static_cast<int>(s.size());
  if (k > rank_) return 0;
  int i = levels_[k].find(s);
  return i < 0 ? Rat(0) : levels_[k].mu[i];
}

}  // namespace specmix
