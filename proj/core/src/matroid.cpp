#include "specmix/matroid.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "specmix/rng.hpp"

namespace specmix {

namespace {

class UniformImpl : public Matroid::Impl {
 public:
  UniformImpl(int n, int r) : n_(n), r_(r) {
    if (n < 0 || r < 0 || r > n) throw InputError("uniform matroid needs 0 <= r <= n");
  }
  int ground_size() const override { return n_; }
  bool independent(const Face& s) const override { return static_cast<int>(s.size()) <= r_; }
  std::string kind() const override { return "uniform"; }
  std::string describe() const override {
    return "uniform(" + std::to_string(n_) + "," + std::to_string(r_) + ")";
  }

 private:
  int n_, r_;
};

class GraphicImpl : public Matroid::Impl {
 public:
  explicit GraphicImpl(Graph graph) : graph_(std::move(graph)) {}
  int ground_size() const override { return static_cast<int>(graph_.edges().size()); }
  bool independent(const Face& s) const override {
    // acyclicity via union-find
    std::vector<int> parent(graph_.n());
    for (int i = 0; i < graph_.n(); ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int ei : s) {
      auto [u, v] = graph_.edges()[ei];
      int ru = find(u), rv = find(v);
      if (ru == rv) return false;
      parent[ru] = rv;
    }
    return true;
  }
  std::string kind() const override { return "graphic"; }
  std::string describe() const override {
    return "graphic(n=" + std::to_string(graph_.n()) +
           ",m=" + std::to_string(graph_.edges().size()) + ")";
  }

 private:
  Graph graph_;
};

class LinearRationalImpl : public Matroid::Impl {
 public:
  explicit LinearRationalImpl(std::vector<std::vector<Rat>> vectors)
      : vectors_(std::move(vectors)) {
    if (vectors_.empty()) throw InputError("linear matroid needs at least one vector");
    dim_ = vectors_[0].size();
    for (const auto& v : vectors_)
      if (v.size() != dim_) throw InputError("linear matroid vectors must share a dimension");
  }
  int ground_size() const override { return static_cast<int>(vectors_.size()); }
  bool independent(const Face& s) const override {
    // exact Gaussian elimination
    std::vector<std::vector<Rat>> rows;
    for (int i : s) rows.push_back(vectors_[i]);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < dim_ && rank < rows.size(); ++col) {
      std::size_t pivot = rank;
      while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
      if (pivot == rows.size()) continue;
      std::swap(rows[rank], rows[pivot]);
      for (std::size_t i = rank + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        Rat factor = rows[i][col] / rows[rank][col];
        for (std::size_t j = col; j < dim_; ++j) rows[i][j] -= factor * rows[rank][j];
      }
      ++rank;
    }
    return rank == rows.size();
  }
  std::string kind() const override { return "linear"; }
  std::string describe() const override {
    return "linear(Q," + std::to_string(vectors_.size()) + " vectors)";
  }

 private:
  std::vector<std::vector<Rat>> vectors_;
  std::size_t dim_;
};

class LinearGfImpl : public Matroid::Impl {
 public:
  LinearGfImpl(std::int64_t p, std::vector<std::vector<std::int64_t>> vectors)
      : p_(p), vectors_(std::move(vectors)) {
    if (p < 2 || p > (std::int64_t{1} << 31)) throw InputError("prime must be in [2, 2^31]");
    for (std::int64_t d = 2; d * d <= p; ++d)
      if (p % d == 0) throw InputError("field order must be prime");
    if (vectors_.empty()) throw InputError("linear matroid needs at least one vector");
    dim_ = vectors_[0].size();
    for (auto& v : vectors_) {
      if (v.size() != dim_) throw InputError("linear matroid vectors must share a dimension");
      for (auto& x : v) x = ((x % p_) + p_) % p_;
    }
  }
  int ground_size() const override { return static_cast<int>(vectors_.size()); }
  bool independent(const Face& s) const override {
    std::vector<std::vector<std::int64_t>> rows;
    for (int i : s) rows.push_back(vectors_[i]);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < dim_ && rank < rows.size(); ++col) {
      std::size_t pivot = rank;
      while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
      if (pivot == rows.size()) continue;
      std::swap(rows[rank], rows[pivot]);
      std::int64_t inv = mod_inverse(rows[rank][col]);
      for (std::size_t i = rank + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        std::int64_t factor = static_cast<std::int64_t>(
            static_cast<__int128>(rows[i][col]) * inv % p_);
        for (std::size_t j = col; j < dim_; ++j) {
          __int128 v = static_cast<__int128>(rows[i][j]) -
                       static_cast<__int128>(factor) * rows[rank][j] % p_;
          rows[i][j] = static_cast<std::int64_t>(((v % p_) + p_) % p_);
        }
      }
      ++rank;
    }
    return rank == rows.size();
  }
  std::string kind() const override { return "linear"; }
  std::string describe() const override {
    return "linear(GF(" + std::to_string(p_) + ")," + std::to_string(vectors_.size()) +
           " vectors)";
  }

 private:
  std::int64_t mod_inverse(std::int64_t a) const {
    // Fermat: a^(p-2) mod p
    std::int64_t result = 1, base = a % p_, e = p_ - 2;
    while (e > 0) {
      if (e & 1) result = static_cast<std::int64_t>(static_cast<__int128>(result) * base % p_);
      base = static_cast<std::int64_t>(static_cast<__int128>(base) * base % p_);
      e >>= 1;
    }
    return result;
  }
  std::int64_t p_;
  std::vector<std::vector<std::int64_t>> vectors_;
  std::size_t dim_;
};

class TransversalImpl : public Matroid::Impl {
 public:
  TransversalImpl(int left, int right, const std::vector<std::pair<int, int>>& edges)
      : left_(left), right_(right), adj_(left) {
    for (auto [l, r] : edges) {
      if (l < 0 || l >= left || r < 0 || r >= right)
        throw InputError("transversal edge endpoint out of range");
      adj_[l].push_back(r);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }
  int ground_size() const override { return left_; }
  bool independent(const Face& s) const override {
    // Kuhn's augmenting paths: can the whole subset be matched?
    std::vector<int> match_right(right_, -1);
    for (int l : s) {
      std::vector<bool> visited(right_, false);
      if (!augment(l, s, visited, match_right)) return false;
    }
    return true;
  }
  std::string kind() const override { return "transversal"; }
  std::string describe() const override {
    return "transversal(L=" + std::to_string(left_) + ",R=" + std::to_string(right_) + ")";
  }

 private:
  bool augment(int l, const Face& s, std::vector<bool>& visited,
               std::vector<int>& match_right) const {
    for (int r : adj_[l]) {
      if (visited[r]) continue;
      visited[r] = true;
      if (match_right[r] == -1 || augment(match_right[r], s, visited, match_right)) {
        match_right[r] = l;
        return true;
      }
    }
    return false;
  }
  int left_, right_;
  std::vector<std::vector<int>> adj_;
};

class ExplicitImpl : public Matroid::Impl {
 public:
  ExplicitImpl(int ground, std::vector<Face> bases) : ground_(ground), bases_(std::move(bases)) {
    if (bases_.empty()) throw InputError("explicit matroid needs at least one basis");
    for (auto& b : bases_) {
      std::sort(b.begin(), b.end());
      for (int e : b)
        if (e < 0 || e >= ground) throw InputError("basis element out of range");
    }
    std::sort(bases_.begin(), bases_.end());
    bases_.erase(std::unique(bases_.begin(), bases_.end()), bases_.end());
  }
  int ground_size() const override { return ground_; }
  bool independent(const Face& s) const override {
    for (const auto& b : bases_)
      if (std::includes(b.begin(), b.end(), s.begin(), s.end())) return true;
    return false;
  }
  std::string kind() const override { return "explicit"; }
  std::string describe() const override {
    return "explicit(" + std::to_string(ground_) + "," + std::to_string(bases_.size()) +
           " bases)";
  }
  const std::vector<Face>& listed_bases() const { return bases_; }

 private:
  int ground_;
  std::vector<Face> bases_;
};

class MinorImpl : public Matroid::Impl {
 public:
  enum class Op { kDual, kRestrict, kContract, kTruncate };

  MinorImpl(Matroid base, Op op, Face set, int k)
      : base_(std::move(base)), op_(op), set_(std::move(set)), k_(k) {
    std::sort(set_.begin(), set_.end());
    if (op_ == Op::kDual) base_rank_ = rank(base_);
  }

  int ground_size() const override { return base_.ground_size(); }

  bool independent(const Face& s) const override {
    switch (op_) {
      case Op::kDual: {
        // T independent in the dual iff the complement still spans
        Face complement;
        for (int e = 0; e < base_.ground_size(); ++e)
          if (!std::binary_search(s.begin(), s.end(), e)) complement.push_back(e);
        return rank_of(base_, complement) == base_rank_;
      }
      case Op::kRestrict:
        return std::includes(set_.begin(), set_.end(), s.begin(), s.end()) &&
               base_.independent(s);
      case Op::kContract: {
        Face merged;
        std::set_intersection(s.begin(), s.end(), set_.begin(), set_.end(),
                              std::back_inserter(merged));
        if (!merged.empty()) return false;  // contracted elements become loops
        merged.clear();
        std::set_union(s.begin(), s.end(), set_.begin(), set_.end(),
                       std::back_inserter(merged));
        return base_.independent(merged);
      }
      case Op::kTruncate:
        return static_cast<int>(s.size()) <= k_ && base_.independent(s);
    }
    return false;
  }

  std::string kind() const override { return "minor"; }
  std::string describe() const override {
    switch (op_) {
      case Op::kDual:
        return "dual(" + base_.describe() + ")";
      case Op::kRestrict:
        return "restrict(" + base_.describe() + "," + face_to_string(set_) + ")";
      case Op::kContract:
        return "contract(" + base_.describe() + "," + face_to_string(set_) + ")";
      case Op::kTruncate:
        return "truncate(" + base_.describe() + "," + std::to_string(k_) + ")";
    }
    return "minor";
  }

 private:
  Matroid base_;
  Op op_;
  Face set_;
  int k_ = 0;
  int base_rank_ = 0;
};

void validate_bases_axioms(int ground, const std::vector<Face>& bases) {
  std::size_t size = bases[0].size();
  for (const auto& b : bases)
    if (b.size() != size)
      throw InputError("explicit bases of unequal size: " + face_to_string(bases[0]) +
                       " vs " + face_to_string(b));
  (void)ground;
  // bases exchange: for B1, B2 and e in B1\B2 there is f in B2\B1 with
  // B1 - e + f again a basis
  std::set<Face> basis_set(bases.begin(), bases.end());
  for (const auto& b1 : bases) {
    for (const auto& b2 : bases) {
      for (int e : b1) {
        if (std::binary_search(b2.begin(), b2.end(), e)) continue;
        bool found = false;
        for (int f : b2) {
          if (std::binary_search(b1.begin(), b1.end(), f)) continue;
          Face candidate;
          for (int x : b1)
            if (x != e) candidate.push_back(x);
          candidate.push_back(f);
          std::sort(candidate.begin(), candidate.end());
          if (basis_set.count(candidate)) {
            found = true;
            break;
          }
        }
        if (!found)
          throw InputError("explicit bases violate the exchange property: " +
                           face_to_string(b1) + " vs " + face_to_string(b2));
      }
    }
  }
}

}  // namespace

Matroid uniform_matroid(int n, int r) { return Matroid(std::make_shared<UniformImpl>(n, r)); }

Matroid graphic_matroid(const Graph& graph) {
  return Matroid(std::make_shared<GraphicImpl>(graph));
}

Matroid linear_matroid_rational(const std::vector<std::vector<Rat>>& vectors) {
  return Matroid(std::make_shared<LinearRationalImpl>(vectors));
}

Matroid linear_matroid_gf(std::int64_t p,
                          const std::vector<std::vector<std::int64_t>>& vectors) {
  return Matroid(std::make_shared<LinearGfImpl>(p, vectors));
}

Matroid transversal_matroid(int left, int right,
                            const std::vector<std::pair<int, int>>& edges) {
  return Matroid(std::make_shared<TransversalImpl>(left, right, edges));
}

Matroid explicit_matroid(int ground, const std::vector<Face>& bases, bool validate) {
  auto impl = std::make_shared<ExplicitImpl>(ground, bases);
  if (validate) validate_bases_axioms(ground, impl->listed_bases());
  return Matroid(impl);
}

Matroid dual(const Matroid& m) {
  return Matroid(std::make_shared<MinorImpl>(m, MinorImpl::Op::kDual, Face{}, 0));
}

Matroid restrict_to(const Matroid& m, const Face& s) {
  return Matroid(std::make_shared<MinorImpl>(m, MinorImpl::Op::kRestrict, s, 0));
}

Matroid contract(const Matroid& m, const Face& s) {
  Face sorted = s;
  std::sort(sorted.begin(), sorted.end());
  if (!m.independent(sorted))
    throw InputError("contraction set must be independent: " + face_to_string(sorted));
  return Matroid(std::make_shared<MinorImpl>(m, MinorImpl::Op::kContract, sorted, 0));
}

Matroid truncate(const Matroid& m, int k) {
  if (k < 1 || k > rank(m)) throw InputError("truncation level must be in [1, rank]");
  return Matroid(std::make_shared<MinorImpl>(m, MinorImpl::Op::kTruncate, Face{}, k));
}

int rank_of(const Matroid& m, const Face& subset) {
  Face current;
  for (int e : subset) {
    current.push_back(e);
    std::sort(current.begin(), current.end());
    if (!m.independent(current)) {
      current.erase(std::find(current.begin(), current.end(), e));
    }
  }
  return static_cast<int>(current.size());
}

int rank(const Matroid& m) {
  Face all(m.ground_size());
  for (int e = 0; e < m.ground_size(); ++e) all[e] = e;
  return rank_of(m, all);
}

namespace {

void bases_dfs(const Matroid& m, int r, int next, Face& current, std::vector<Face>& out,
               const Caps& caps) {
  if (static_cast<int>(current.size()) == r) {
    if (out.size() >= caps.max_bases)
      throw CapExceededError("bases enumeration exceeds cap", out.size() + 1);
    out.push_back(current);
    return;
  }
  int needed = r - static_cast<int>(current.size());
  for (int e = next; e + needed <= m.ground_size(); ++e) {
    current.push_back(e);
    if (m.independent(current)) bases_dfs(m, r, e + 1, current, out, caps);
    current.pop_back();
  }
}

}  // namespace

BasesSet bases(const Matroid& m, const Caps& caps) {
  BasesSet set;
  set.rank = rank(m);
  Face current;
  bases_dfs(m, set.rank, 0, current, set.bases, caps);
  return set;
}

AxiomsReport axioms_check(const Matroid& m, const Caps& caps) {
  int n = m.ground_size();
  if ((std::uint64_t{1} << n) > caps.max_configs)
    throw CapExceededError("axioms check needs 2^n within the configuration cap",
                           std::uint64_t{1} << n);
  AxiomsReport report;
  std::vector<Face> independent_sets;
  std::vector<std::uint32_t> independent_masks;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Face s;
    for (int e = 0; e < n; ++e)
      if (mask >> e & 1) s.push_back(e);
    if (m.independent(s)) {
      independent_sets.push_back(std::move(s));
      independent_masks.push_back(mask);
    }
  }
  std::set<std::uint32_t> independent_lookup(independent_masks.begin(), independent_masks.end());

  // P1: downward closure
  for (std::size_t i = 0; i < independent_sets.size() && report.downward_closed; ++i) {
    std::uint32_t mask = independent_masks[i];
    for (int e = 0; e < n; ++e) {
      if (!(mask >> e & 1)) continue;
      if (!independent_lookup.count(mask & ~(1u << e))) {
        report.downward_closed = false;
        report.witness = "P1: " + face_to_string(independent_sets[i]) + " independent but " +
                         face_to_string(independent_sets[i]) + " minus element " +
                         std::to_string(e) + " is not";
        break;
      }
    }
  }

  // P2: exchange
  for (std::size_t i = 0; i < independent_sets.size() && report.exchange; ++i) {
    for (std::size_t j = 0; j < independent_sets.size() && report.exchange; ++j) {
      if (independent_sets[i].size() >= independent_sets[j].size()) continue;
      bool found = false;
      std::uint32_t si = independent_masks[i], sj = independent_masks[j];
      for (std::uint32_t cand = sj & ~si; cand;) {
        int e = __builtin_ctz(cand);
        cand &= cand - 1;
        if (independent_lookup.count(si | (1u << e))) {
          found = true;
          break;
        }
      }
      if (!found) {
        report.exchange = false;
        report.witness = "P2: no exchange element from " + face_to_string(independent_sets[j]) +
                         " into " + face_to_string(independent_sets[i]);
      }
    }
  }

  // maximal independent sets must share a size
  int max_size = 0;
  for (const auto& s : independent_sets) max_size = std::max(max_size, (int)s.size());
  for (std::size_t i = 0; i < independent_sets.size(); ++i) {
    std::uint32_t mask = independent_masks[i];
    bool maximal = true;
    for (int e = 0; e < n && maximal; ++e)
      if (!(mask >> e & 1) && independent_lookup.count(mask | (1u << e))) maximal = false;
    if (maximal && static_cast<int>(independent_sets[i].size()) != max_size) {
      report.bases_equal_size = false;
      if (report.witness.empty())
        report.witness = "maximal independent set " + face_to_string(independent_sets[i]) +
                         " has size " + std::to_string(independent_sets[i].size()) +
                         " but the rank is " + std::to_string(max_size);
      break;
    }
  }
  return report;
}

WalkKernel bases_exchange_kernel(const Matroid& m, const Caps& caps) {
  auto all = bases(m, caps);
  int r = all.rank;
  std::map<Face, int> index;
  for (std::size_t i = 0; i < all.bases.size(); ++i)
    index[all.bases[i]] = static_cast<int>(i);
  int count = static_cast<int>(all.bases.size());
  WalkKernel kernel;
  kernel.entries = DenseMatrix(count, count);
  for (int i = 0; i < count; ++i) {
    const Face& b = all.bases[i];
    for (int e : b) {
      Face reduced;
      for (int x : b)
        if (x != e) reduced.push_back(x);
      // replacements keeping a basis; e itself is always one
      std::vector<int> replacements;
      for (int f = 0; f < m.ground_size(); ++f) {
        if (std::binary_search(reduced.begin(), reduced.end(), f)) continue;
        Face candidate = reduced;
        candidate.insert(std::lower_bound(candidate.begin(), candidate.end(), f), f);
        if (m.independent(candidate)) replacements.push_back(f);
      }
      for (int f : replacements) {
        Face candidate = reduced;
        candidate.insert(std::lower_bound(candidate.begin(), candidate.end(), f), f);
        kernel.entries.at(i, index.at(candidate)) +=
            1.0 / (static_cast<double>(r) * replacements.size());
      }
    }
  }
  for (const auto& b : all.bases) kernel.row_labels.push_back(face_to_string(b));
  kernel.col_labels = kernel.row_labels;
  kernel.stationary.assign(count, 1.0 / count);
  kernel.reversible = true;
  return kernel;
}

FaceComplex matroid_complex(const Matroid& m, const Caps& caps) {
  auto all = bases(m, caps);
  std::vector<Rat> weights(all.bases.size(), Rat(1));
  return FaceComplex(m.ground_size(), all.bases, std::move(weights), caps);
}

MatroidLocalWalk matroid_local_walk(const Matroid& m, const Face& s, const Caps& caps) {
  Face sorted = s;
  std::sort(sorted.begin(), sorted.end());
  if (!m.independent(sorted))
    throw InputError("local walk needs an independent pinning set");
  auto complex = matroid_complex(m, caps);
  if (static_cast<int>(sorted.size()) > complex.rank() - 2)
    throw DegenerateWalkError("local walk needs |S| <= rank - 2");
  auto walk = complex.local_walk(sorted);
  MatroidLocalWalk out;
  out.pinning = sorted;
  out.elements = walk.states;
  out.kernel.entries = std::move(walk.kernel);
  out.kernel.stationary = std::move(walk.stationary);
  for (int e : out.elements) out.kernel.row_labels.push_back(std::to_string(e));
  out.kernel.col_labels = out.kernel.row_labels;
  out.kernel.reversible = true;
  return out;
}

Rank2Structure rank2_structure(const Matroid& m, const Caps& caps) {
  if (rank(m) != 2) throw InputError("rank-2 structure needs a rank-2 matroid");
  Rank2Structure out;
  int n = m.ground_size();
  std::vector<int> regular;
  for (int e = 0; e < n; ++e) {
    if (m.independent({e}))
      regular.push_back(e);
    else
      out.loops.push_back(e);
  }
  auto dependent_pair = [&](int a, int b) {
    Face pair{std::min(a, b), std::max(a, b)};
    return !m.independent(pair);
  };
  for (int e : regular) {
    bool placed = false;
    for (auto& part : out.parts) {
      if (dependent_pair(part.front(), e)) {
        part.push_back(e);
        placed = true;
        break;
      }
    }
    if (!placed) out.parts.push_back({e});
  }
  // complete multipartite: same part => dependent, across parts => independent
  for (std::size_t a = 0; a < out.parts.size() && out.multipartite_ok; ++a) {
    for (std::size_t b = a; b < out.parts.size() && out.multipartite_ok; ++b) {
      for (int x : out.parts[a]) {
        for (int y : out.parts[b]) {
          if (x >= y) continue;
          bool dep = dependent_pair(x, y);
          bool expect_dep = a == b;
          if (dep != expect_dep) {
            out.multipartite_ok = false;
            out.witness = "pair {" + std::to_string(x) + "," + std::to_string(y) +
                          "} breaks the multipartite structure";
            break;
          }
        }
        if (!out.multipartite_ok) break;
      }
    }
  }
  auto walk = matroid_local_walk(m, {}, caps);
  auto spectrum = reversible_spectrum(walk.kernel);
  out.lambda2 = spectrum.eigenvalues.size() > 1 ? spectrum.eigenvalues[1] : 0.0;
  return out;
}

TrickleDownReport trickle_down_certify(const Matroid& m, const Caps& caps, double tol) {
  auto complex = matroid_complex(m, caps);
  int r = complex.rank();
  TrickleDownReport report;
  if (r < 2) return report;  // no local walks below rank 2
  for (int level = 0; level <= r - 2; ++level) {
    TrickleDownLevel row;
    row.level = level;
    bool first = true;
    for (const auto& face : complex.level(level).faces) {
      auto walk = complex.local_walk(face);
      auto g = gap(reversible_spectrum(walk.kernel, walk.stationary));
      if (g.reducible) {
        report.aborted = true;
        report.reducible_witness = face;
        return report;
      }
      if (first || g.gamma < row.gamma_min) {
        first = false;
        row.gamma_min = g.gamma;
        row.witness = face;
      }
    }
    report.levels.push_back(std::move(row));
  }
  report.worst_recursion_margin = 2.0;
  report.worst_final_margin = 2.0;
  for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
    double lhs = report.levels[i].gamma_min;
    double rhs = 2.0 - 1.0 / report.levels[i + 1].gamma_min;
    double margin = lhs - rhs;
    report.worst_recursion_margin = std::min(report.worst_recursion_margin, margin);
    if (margin < -tol) report.recursion_ok = false;
  }
  for (const auto& row : report.levels) {
    double margin = row.gamma_min - 1.0;
    report.worst_final_margin = std::min(report.worst_final_margin, margin);
    if (margin < -tol) report.final_ok = false;
  }
  return report;
}

std::string ReliabilityReport::to_json() const {
  nlohmann::json j;
  j["dual_formula"] = to_double(dual_formula);
  j["dual_formula_exact"] = format_rational(dual_formula);
  if (direct_available) {
    j["direct_enumeration"] = to_double(direct);
    j["direct_enumeration_exact"] = format_rational(direct);
    j["match"] = match;
  } else {
    j["direct_enumeration"] = nullptr;
  }
  return j.dump();
}

ReliabilityReport reliability(const Matroid& m, const Rat& p, const Caps& caps) {
  if (p < 0 || p > 1) throw InputError("inclusion probability must be in [0, 1]");
  int n = m.ground_size();
  if ((std::uint64_t{1} << n) > caps.max_configs)
    throw CapExceededError("reliability enumeration needs 2^n within cap",
                           std::uint64_t{1} << n);
  ReliabilityReport report;
  Matroid dual_m = dual(m);
  int r = rank(m);

  // dual path: counts of dual independent sets by size
  std::vector<BigInt> dual_counts(n + 1, BigInt(0));
  // direct path: mass of subsets containing a basis
  Rat direct = 0;
  std::vector<Rat> p_pow(n + 1), q_pow(n + 1);
  p_pow[0] = 1;
  q_pow[0] = 1;
  for (int i = 1; i <= n; ++i) {
    p_pow[i] = p_pow[i - 1] * p;
    q_pow[i] = q_pow[i - 1] * (1 - p);
  }
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Face s;
    for (int e = 0; e < n; ++e)
      if (mask >> e & 1) s.push_back(e);
    if (dual_m.independent(s)) ++dual_counts[s.size()];
    // X = complement(s) viewpoint is equivalent; enumerate directly instead
    if (rank_of(m, s) == r) direct += p_pow[s.size()] * q_pow[n - s.size()];
  }
  Rat dual_value = 0;
  for (int k = 0; k <= n; ++k)
    dual_value += q_pow[k] * p_pow[n - k] * Rat(dual_counts[k]);
  report.dual_formula = dual_value;
  report.direct = direct;
  report.match = dual_value == direct;
  return report;
}

MatroidTrajectory simulate_bases_exchange(const Matroid& m, long steps, std::uint64_t seed,
                                          const Caps& caps) {
  if (steps < 0) throw InputError("steps must be non-negative");
  (void)caps;
  int r = rank(m);
  // start from the lexicographically smallest basis
  Face current;
  for (int e = 0; e < m.ground_size() && static_cast<int>(current.size()) < r; ++e) {
    current.push_back(e);
    if (!m.independent(current)) current.pop_back();
  }
  MatroidTrajectory trajectory;
  trajectory.seed = seed;
  trajectory.steps = steps;
  trajectory.states.push_back(current);
  Rng rng(seed);
  for (long t = 0; t < steps; ++t) {
    int drop = static_cast<int>(rng.uniform_int(r));
    Face reduced;
    for (int i = 0; i < r; ++i)
      if (i != drop) reduced.push_back(current[i]);
    std::vector<int> replacements;
    for (int f = 0; f < m.ground_size(); ++f) {
      if (std::binary_search(reduced.begin(), reduced.end(), f)) continue;
      Face candidate = reduced;
      candidate.insert(std::lower_bound(candidate.begin(), candidate.end(), f), f);
      if (m.independent(candidate)) replacements.push_back(f);
    }
    int f = replacements[rng.uniform_int(replacements.size())];
    current = reduced;
    current.insert(std::lower_bound(current.begin(), current.end(), f), f);
    trajectory.states.push_back(current);
    ++trajectory.counts[current];
  }
  return trajectory;
}

double empirical_tv_uniform(const MatroidTrajectory& trajectory, std::size_t num_bases) {
  long total = 0;
  for (const auto& [face, count] : trajectory.counts) total += count;
  if (total == 0) return 1.0;
  double uniform = 1.0 / static_cast<double>(num_bases);
  double acc = 0;
  std::size_t seen = 0;
  for (const auto& [face, count] : trajectory.counts) {
    acc += std::fabs(static_cast<double>(count) / total - uniform);
    ++seen;
  }
  acc += (num_bases - seen) * uniform;  // bases never visited
  return 0.5 * acc;
}

namespace {

Matroid matroid_from_json(const nlohmann::json& j);

Matroid named_matroid(const std::string& name) {
  if (name == "graphic-triangle") return graphic_matroid(Graph::cycle(3));
  if (name == "graphic-K4") return graphic_matroid(Graph::clique(4));
  if (name == "fano") {
    std::vector<std::vector<std::int64_t>> vectors = {
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
    return linear_matroid_gf(2, vectors);
  }
  if (name == "transversal-demo") {
    // L = {0..3}, R = {0..2}: a rank-3 transversal matroid
    return transversal_matroid(4, 3, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 2}});
  }
  if (name == "explicit-bad")
    return explicit_matroid(4, {{1}, {2, 3}}, /*validate=*/false);
  if (name.rfind("uniform-", 0) == 0) {
    auto rest = name.substr(8);
    auto dash = rest.find('-');
    if (dash != std::string::npos) {
      int n = std::stoi(rest.substr(0, dash));
      int r = std::stoi(rest.substr(dash + 1));
      return uniform_matroid(n, r);
    }
  }
  if (name.rfind("graphic-", 0) == 0)
    return graphic_matroid(Graph::named(name.substr(8)));
  throw InputError("unknown builtin matroid name: " + name);
}

Matroid matroid_from_json(const nlohmann::json& j) {
  if (j.is_string()) return named_matroid(j.get<std::string>());
  if (!j.contains("kind")) throw InputError("matroid spec needs a \"kind\" field");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "uniform") return uniform_matroid(j.at("n").get<int>(), j.at("r").get<int>());
  if (kind == "graphic") {
    const auto& g = j.at("graph");
    if (g.is_string()) return graphic_matroid(Graph::named(g.get<std::string>()));
    return graphic_matroid(Graph::from_json(g.dump()));
  }
  if (kind == "linear") {
    std::string field = j.value("field", "rational");
    if (field == "rational") {
      std::vector<std::vector<Rat>> vectors;
      for (const auto& row : j.at("vectors")) {
        std::vector<Rat> v;
        for (const auto& x : row)
          v.push_back(x.is_string() ? parse_rational(x.get<std::string>())
                                    : Rat(x.get<long>()));
        vectors.push_back(std::move(v));
      }
      return linear_matroid_rational(vectors);
    }
    std::vector<std::vector<std::int64_t>> vectors;
    for (const auto& row : j.at("vectors"))
      vectors.emplace_back(row.begin(), row.end());
    return linear_matroid_gf(j.at("p").get<std::int64_t>(), vectors);
  }
  if (kind == "transversal") {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    return transversal_matroid(j.at("left").get<int>(), j.at("right").get<int>(), edges);
  }
  if (kind == "explicit") {
    std::vector<Face> bases_list;
    for (const auto& b : j.at("bases")) bases_list.emplace_back(b.begin(), b.end());
    return explicit_matroid(j.at("ground").get<int>(), bases_list, j.value("validate", true));
  }
  if (kind == "minor") {
    Matroid base = matroid_from_json(j.at("of"));
    std::string op = j.at("op").get<std::string>();
    if (op == "dual") return dual(base);
    if (op == "truncate") return truncate(base, j.at("k").get<int>());
    Face set(j.at("set").begin(), j.at("set").end());
    if (op == "restrict") return restrict_to(base, set);
    if (op == "contract") return contract(base, set);
    throw InputError("unknown minor op: " + op);
  }
  throw InputError("unknown matroid kind: " + kind);
}

}  // namespace

Matroid matroid_from_spec(const std::string& text) {
  auto trimmed = text;
  if (!trimmed.empty() && (trimmed.front() == '{' || trimmed.front() == '"')) {
    try {
      return matroid_from_json(nlohmann::json::parse(trimmed));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("matroid JSON parse error: ") + e.what());
    }
  }
  return named_matroid(trimmed);
}

}  // namespace specmix
