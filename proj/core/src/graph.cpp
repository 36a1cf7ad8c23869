#include "specmix/graph.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "specmix/errors.hpp"
#include "specmix/rng.hpp"

namespace specmix {

Graph::Graph(int n, std::vector<std::pair<int, int>> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n < 0 || n > 32) throw InputError("vertex count must be in [0, 32]");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second) throw InputError("self-loop at vertex " + std::to_string(e.first));
    if (e.first < 0 || e.second >= n) throw InputError("edge endpoint out of range");
    if (!seen.insert(e).second) throw InputError("duplicate edge");
  }
  std::sort(edges_.begin(), edges_.end());
  adjacency_.assign(n, {});
  neighbor_masks_.assign(n, 0);
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    neighbor_masks_[u] |= 1u << v;
    neighbor_masks_[v] |= 1u << u;
  }
  for (auto& a : adjacency_) {
    std::sort(a.begin(), a.end());
    max_degree_ = std::max(max_degree_, static_cast<int>(a.size()));
  }
}

Graph Graph::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("graph JSON parse error: ") + e.what());
  }
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw InputError("graph JSON: missing integer field \"n\"");
  int n = j["n"].get<int>();
  std::vector<std::pair<int, int>> edges;
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw InputError("graph JSON: edges must be [u,v] pairs");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  return Graph(n, std::move(edges));
}

std::string Graph::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : edges_) j["edges"].push_back({u, v});
  return j.dump();
}

Graph Graph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph Graph::cycle(int n) {
  if (n < 3) throw InputError("cycle needs >= 3 vertices");
  auto g = path(n);
  auto e = g.edges();
  e.emplace_back(0, n - 1);
  return Graph(n, std::move(e));
}

Graph Graph::clique(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph Graph::edgeless(int n) { return Graph(n, {}); }

Graph Graph::star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph(leaves + 1, std::move(e));
}

Graph Graph::complete_bipartite(int a, int b) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
  return Graph(a + b, std::move(e));
}

Graph Graph::hypercube(int dim) {
  int n = 1 << dim;
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v)
    for (int d = 0; d < dim; ++d)
      if (!(v >> d & 1)) e.emplace_back(v, v | (1 << d));
  return Graph(n, std::move(e));
}

Graph Graph::petersen() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);        // outer cycle
    e.emplace_back(i, i + 5);              // spokes
    e.emplace_back(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  return Graph(10, std::move(e));
}

Graph Graph::erdos_renyi(int n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph Graph::named(const std::string& name) {
  auto suffix_int = [&](const std::string& prefix) -> int {
    return std::stoi(name.substr(prefix.size()));
  };
  try {
    if (name == "triangle") return cycle(3);
    if (name == "cube") return hypercube(3);
    if (name == "petersen") return petersen();
    if (name == "k33") return complete_bipartite(3, 3);
    if (name.rfind("path", 0) == 0) return path(suffix_int("path"));
    if (name.rfind("cycle", 0) == 0) return cycle(suffix_int("cycle"));
    if (name.rfind("clique", 0) == 0) return clique(suffix_int("clique"));
    if (name.rfind("empty", 0) == 0) return edgeless(suffix_int("empty"));
    if (name.rfind("star", 0) == 0) return star(suffix_int("star"));
    if (name.size() >= 2 && name[0] == 'K' && std::isdigit(static_cast<unsigned char>(name[1])))
      return clique(std::stoi(name.substr(1)));
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw InputError("unknown builtin graph name: " + name);
}

Caps Caps::from_env() {
  Caps caps;
  auto read = [](const char* var, std::uint64_t& field) {
    if (const char* v = std::getenv(var)) field = std::strtoull(v, nullptr, 10);
  };
  read("SPECMIX_MAX_CONFIGS", caps.max_configs);
  read("SPECMIX_MAX_PINNINGS", caps.max_pinnings_per_level);
  read("SPECMIX_MAX_BASES", caps.max_bases);
  read("SPECMIX_MAX_SUBSETS", caps.max_subsets_exact);
  read("SPECMIX_MAX_POWER_STATES", caps.max_power_states);
  return caps;
}

}  // namespace specmix
