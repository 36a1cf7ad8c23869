#include "specmix/gibbs.hpp"

#include <algorithm>
#include <sstream>

namespace specmix {

SpinConfig SpinConfig::from_bitstring(const std::string& s) {
  if (s.empty() || s.size() > 32) throw InputError("bitstring length must be in [1, 32]");
  SpinConfig c;
  c.n = static_cast<int>(s.size());
  for (int v = 0; v < c.n; ++v) {
    if (s[v] == '1')
      c.mask |= 1u << v;
    else if (s[v] != '0')
      throw InputError("bitstring must contain only 0/1: " + s);
  }
  return c;
}

Pinning::Pinning(std::vector<std::pair<int, int>> assignments)
    : assignments_(std::move(assignments)) {
  std::sort(assignments_.begin(), assignments_.end());
  for (auto [v, s] : assignments_) {
    if (v < 0 || v >= 32) throw InputError("pinned vertex out of range");
    if (s != 0 && s != 1) throw InputError("pinned spin must be 0 or 1");
    if ((vertex_mask_ >> v) & 1u) throw InputError("vertex pinned twice");
    vertex_mask_ |= 1u << v;
    if (s) spin_bits_ |= 1u << v;
  }
}

Pinning Pinning::with(int v, int s) const {
  if (pins(v)) throw InputError("vertex already pinned");
  auto a = assignments_;
  a.emplace_back(v, s);
  return Pinning(std::move(a));
}

Pinning Pinning::merged(const Pinning& other) const {
  auto a = assignments_;
  for (auto [v, s] : other.assignments_) {
    if (pins(v)) {
      if (spin_at(v) != s) throw InputError("conflicting pinnings at vertex " + std::to_string(v));
      continue;
    }
    a.emplace_back(v, s);
  }
  return Pinning(std::move(a));
}

std::string Pinning::to_string() const {
  std::string s;
  for (auto [v, sp] : assignments_) {
    if (!s.empty()) s += ",";
    s += std::to_string(v) + ":" + std::to_string(sp);
  }
  return s;
}

SpinSystem::SpinSystem(Graph graph, std::vector<std::uint32_t> support_masks,
                       std::vector<Rat> weights, Rat partition_value)
    : graph_(std::move(graph)), partition_value_(std::move(partition_value)) {
  if (support_masks.size() != weights.size())
    throw InputError("support/weight size mismatch");
  std::vector<int> order(support_masks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return config_lex_less(support_masks[a], support_masks[b]);
  });
  Rat total = 0;
  for (const auto& w : weights) {
    if (w < 0) throw InputError("negative weight");
    total += w;
  }
  if (total == 0) throw InputError("all weights are zero");
  support_.reserve(order.size());
  probs_.reserve(order.size());
  for (int i : order) {
    if (weights[i] == 0) continue;  // zero-weight configs excluded from support
    support_.push_back(support_masks[i]);
    probs_.push_back(weights[i] / total);
  }
  for (std::size_t i = 0; i + 1 < support_.size(); ++i)
    if (support_[i] == support_[i + 1]) throw InputError("duplicate configuration");
  probs_d_.reserve(probs_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    probs_d_.push_back(to_double(probs_[i]));
    index_[support_[i]] = static_cast<int>(i);
  }
}

int SpinSystem::index_of(std::uint32_t mask) const {
  auto it = index_.find(mask);
  return it == index_.end() ? -1 : it->second;
}

bool SpinSystem::is_valid_pinning(const Pinning& tau) const {
  for (auto m : support_)
    if (tau.matches(m)) return true;
  return false;
}

Rat SpinSystem::mu(const Pinning& tau) const {
  Rat acc = 0;
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (tau.matches(support_[i])) acc += probs_[i];
  return acc;
}

std::string SpinSystem::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < support_.size(); ++i)
    out << config(static_cast<int>(i)).bitstring() << "," << format_rational(probs_[i]) << "\n";
  return out.str();
}

SpinSystem build_hardcore(const Graph& graph, const Rat& activity, const Caps& caps) {
  if (activity <= 0) throw InputError("activity must be positive");
  int n = graph.n();
  std::uint64_t total = std::uint64_t{1} << n;
  if (total > caps.max_configs)
    throw CapExceededError("hard-core enumeration over 2^" + std::to_string(n) +
                               " configurations exceeds cap",
                           total);
  // lambda^k precomputed per occupation count
  std::vector<Rat> powers(n + 1);
  powers[0] = 1;
  for (int k = 1; k <= n; ++k) powers[k] = powers[k - 1] * activity;

  std::vector<std::uint32_t> support;
  std::vector<Rat> weights;
  Rat z = 0;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    bool independent = true;
    for (std::uint32_t rest = mask; rest;) {
      int v = __builtin_ctz(rest);
      rest &= rest - 1;
      if (mask & graph.neighbor_mask(v)) {
        independent = false;
        break;
      }
    }
    if (!independent) continue;
    support.push_back(mask);
    weights.push_back(powers[__builtin_popcount(mask)]);
    z += weights.back();
  }
  return SpinSystem(graph, std::move(support), std::move(weights), z);
}

SpinSystem load_table(const Graph& graph,
                      const std::vector<std::pair<SpinConfig, Rat>>& records) {
  std::vector<std::uint32_t> support;
  std::vector<Rat> weights;
  Rat z = 0;
  for (const auto& [config, w] : records) {
    if (config.n != graph.n()) throw InputError("configuration length mismatch");
    support.push_back(config.mask);
    weights.push_back(w);
    z += w;
  }
  // duplicate detection must consider zero-weight rows too
  auto sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("duplicate configuration");
  return SpinSystem(graph, std::move(support), std::move(weights), z);
}

SpinSystem load_table_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::pair<SpinConfig, Rat>> records;
  int n = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("CSV row missing comma: " + line);
    auto config = SpinConfig::from_bitstring(line.substr(0, comma));
    if (n == -1)
      n = config.n;
    else if (n != config.n)
      throw InputError("CSV rows with inconsistent bitstring length");
    records.emplace_back(config, parse_rational(line.substr(comma + 1)));
  }
  if (records.empty()) throw InputError("empty CSV table");
  return load_table(Graph::edgeless(n), records);
}

SpinSystem condition(const SpinSystem& system, const Pinning& tau) {
  std::vector<std::uint32_t> support;
  std::vector<Rat> weights;
  for (int i = 0; i < system.size(); ++i) {
    if (!tau.matches(system.support()[i])) continue;
    support.push_back(system.support()[i]);
    weights.push_back(system.prob(i));
  }
  if (support.empty())
    throw InvalidPinningError("pinning {" + tau.to_string() + "} has empty conditional support");
  return SpinSystem(system.graph(), std::move(support), std::move(weights),
                    system.partition_value());
}

Rat marginal_exact(const SpinSystem& system, int vertex, int spin) {
  if (vertex < 0 || vertex >= system.n()) throw InputError("vertex out of range");
  Rat acc = 0;
  for (int i = 0; i < system.size(); ++i)
    if (((system.support()[i] >> vertex) & 1) == static_cast<unsigned>(spin))
      acc += system.prob(i);
  return acc;
}

double marginal(const SpinSystem& system, int vertex, int spin) {
  return to_double(marginal_exact(system, vertex, spin));
}

Rat cond_marginal_exact(const SpinSystem& system, const Pinning& tau, int vertex, int spin) {
  Rat num = 0, den = 0;
  for (int i = 0; i < system.size(); ++i) {
    std::uint32_t m = system.support()[i];
    if (!tau.matches(m)) continue;
    den += system.prob(i);
    if (((m >> vertex) & 1) == static_cast<unsigned>(spin)) num += system.prob(i);
  }
  if (den == 0)
    throw InvalidPinningError("pinning {" + tau.to_string() + "} has empty conditional support");
  return num / den;
}

double cond_marginal(const SpinSystem& system, const Pinning& tau, int vertex, int spin) {
  double num = 0, den = 0;
  for (int i = 0; i < system.size(); ++i) {
    std::uint32_t m = system.support()[i];
    if (!tau.matches(m)) continue;
    den += system.prob_d(i);
    if (((m >> vertex) & 1) == static_cast<unsigned>(spin)) num += system.prob_d(i);
  }
  if (den == 0)
    throw InvalidPinningError("pinning {" + tau.to_string() + "} has empty conditional support");
  return num / den;
}

std::vector<Pinning> enumerate_pinnings(const SpinSystem& system, int k, const Caps& caps) {
  int n = system.n();
  if (k < 0 || k > n) throw InputError("pinning level out of range");
  // restrictions of support configs to k-subsets; valid pinnings are exactly
  // these restrictions
  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i;
  std::map<std::pair<std::uint32_t, std::uint32_t>, bool> seen;  // (S mask, spins)
  while (true) {
    std::uint32_t smask = 0;
    for (int v : subset) smask |= 1u << v;
    for (int i = 0; i < system.size(); ++i) {
      std::uint32_t bits = system.support()[i] & smask;
      seen[{smask, bits}] = true;
      if (seen.size() > caps.max_pinnings_per_level)
        throw CapExceededError("pinnings at level " + std::to_string(k) + " exceed cap",
                               seen.size());
    }
    // next k-subset in lexicographic order
    int i = k - 1;
    while (i >= 0 && subset[i] == n - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  std::vector<Pinning> out;
  out.reserve(seen.size());
  for (const auto& [key, _] : seen) {
    std::vector<std::pair<int, int>> assignment;
    for (std::uint32_t rest = key.first; rest;) {
      int v = __builtin_ctz(rest);
      rest &= rest - 1;
      assignment.emplace_back(v, (key.second >> v) & 1);
    }
    out.emplace_back(std::move(assignment));
  }
  std::sort(out.begin(), out.end());
  return out;
}

FreeFrozenSplit free_frozen_split(const SpinSystem& system, const Pinning& tau) {
  if (!system.is_valid_pinning(tau))
    throw InvalidPinningError("pinning {" + tau.to_string() + "} is invalid");
  FreeFrozenSplit split;
  for (int v = 0; v < system.n(); ++v) {
    if (tau.pins(v)) continue;
    bool zero = false, one = false;
    for (int i = 0; i < system.size(); ++i) {
      std::uint32_t m = system.support()[i];
      if (!tau.matches(m)) continue;
      ((m >> v) & 1 ? one : zero) = true;
      if (zero && one) break;
    }
    if (zero && one)
      split.free_vertices.push_back(v);
    else
      split.frozen.emplace_back(v, one ? 1 : 0);
  }
  return split;
}

Rat marginal_bound_exact(const SpinSystem& system, const Caps& caps) {
  Rat best = 1;
  for (int k = 0; k <= system.n(); ++k) {
    for (const auto& tau : enumerate_pinnings(system, k, caps)) {
      for (int v = 0; v < system.n(); ++v) {
        for (int s = 0; s < 2; ++s) {
          Rat m = cond_marginal_exact(system, tau, v, s);
          if (m > 0 && m < best) best = m;
        }
      }
    }
  }
  return best;
}

double marginal_bound(const SpinSystem& system, const Caps& caps) {
  return to_double(marginal_bound_exact(system, caps));
}

}  // namespace specmix
