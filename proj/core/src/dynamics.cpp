#include "specmix/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "specmix/rng.hpp"

namespace specmix {

namespace {

std::vector<std::string> config_labels(const SpinSystem& system) {
  std::vector<std::string> labels;
  labels.reserve(system.size());
  for (int i = 0; i < system.size(); ++i) labels.push_back(system.config(i).bitstring());
  return labels;
}

}  // namespace

WalkKernel glauber_kernel(const SpinSystem& system, const Caps& caps) {
  if (static_cast<std::uint64_t>(system.size()) > caps.max_configs)
    throw CapExceededError("state space exceeds cap", system.size());
  int n = system.n();
  int m = system.size();
  WalkKernel kernel;
  kernel.entries = DenseMatrix(m, m);
  for (int i = 0; i < m; ++i) {
    std::uint32_t cfg = system.support()[i];
    for (int v = 0; v < n; ++v) {
      std::uint32_t flipped = cfg ^ (1u << v);
      int j = system.index_of(flipped);
      double stay = system.prob_d(i);
      double move = j >= 0 ? system.prob_d(j) : 0.0;
      double denom = stay + move;
      kernel.entries.at(i, i) += stay / denom / n;
      if (j >= 0) kernel.entries.at(i, j) += move / denom / n;
    }
  }
  kernel.row_labels = config_labels(system);
  kernel.col_labels = kernel.row_labels;
  kernel.stationary = system.probs_d();
  kernel.reversible = true;
  return kernel;
}

WalkKernel block_kernel(const SpinSystem& system, int block_size, const Caps& caps) {
  int n = system.n();
  if (block_size < 1 || block_size > n) throw InputError("block size must be in [1, n]");
  if (static_cast<std::uint64_t>(system.size()) > caps.max_configs)
    throw CapExceededError("state space exceeds cap", system.size());
  int m = system.size();
  WalkKernel kernel;
  kernel.entries = DenseMatrix(m, m);
  double inv_subsets = 1.0 / to_double(Rat(binomial(n, block_size)));

  std::vector<int> subset(block_size);
  for (int i = 0; i < block_size; ++i) subset[i] = i;
  while (true) {
    std::uint32_t smask = 0;
    for (int v : subset) smask |= 1u << v;
    std::uint32_t keep = ~smask;
    // group support by the configuration outside the block
    std::map<std::uint32_t, double> class_mass;
    for (int i = 0; i < m; ++i) class_mass[system.support()[i] & keep] += system.prob_d(i);
    for (int i = 0; i < m; ++i) {
      std::uint32_t key = system.support()[i] & keep;
      double mass = class_mass[key];
      for (int j = 0; j < m; ++j) {
        if ((system.support()[j] & keep) != key) continue;
        kernel.entries.at(i, j) += inv_subsets * system.prob_d(j) / mass;
      }
    }
    int i = block_size - 1;
    while (i >= 0 && subset[i] == n - block_size + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < block_size; ++j) subset[j] = subset[j - 1] + 1;
  }
  kernel.row_labels = config_labels(system);
  kernel.col_labels = kernel.row_labels;
  kernel.stationary = system.probs_d();
  kernel.reversible = true;
  return kernel;
}

WalkKernel lazy(const WalkKernel& kernel) {
  if (!kernel.square()) throw InputError("lazy transform needs a square kernel");
  WalkKernel out = kernel;
  for (int i = 0; i < out.entries.rows(); ++i)
    for (int j = 0; j < out.entries.cols(); ++j)
      out.entries.at(i, j) = 0.5 * kernel.entries.at(i, j) + (i == j ? 0.5 : 0.0);
  return out;
}

std::vector<double> apply_kernel(const WalkKernel& kernel, const std::vector<double>& f) {
  return multiply(kernel.entries, f);
}

long MixingReport::t_mix(double eps) const {
  for (const auto& [e, t] : t_mix_exact)
    if (std::fabs(e - eps) < 1e-15) return t;
  throw InputError("eps not tabulated in mixing report");
}

std::string MixingReport::to_json() const {
  nlohmann::json j;
  j["gamma"] = gamma;
  j["lambda_star"] = lambda_star;
  j["t_relax"] = t_relax;
  j["mu_star"] = mu_star;
  j["psd_min_eigenvalue"] = psd_min_eigenvalue;
  j["bound_t_mix"] = bound_t_mix;
  j["bound_t_relax"] = bound_t_relax;
  j["bound_t_relax_standard"] = bound_t_relax_standard;
  j["sites"] = sites;
  auto arr = nlohmann::json::array();
  for (const auto& [eps, t] : t_mix_exact) arr.push_back({{"eps", eps}, {"t_mix", t}});
  j["t_mix_exact"] = arr;
  return j.dump();
}

namespace {

void renormalize_rows(DenseMatrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    double sum = 0;
    for (int j = 0; j < m.cols(); ++j) sum += m.at(i, j);
    if (sum > 0)
      for (int j = 0; j < m.cols(); ++j) m.at(i, j) /= sum;
  }
}

double worst_tv(const DenseMatrix& power, const std::vector<double>& pi) {
  double worst = 0;
  for (int i = 0; i < power.rows(); ++i) {
    double acc = 0;
    for (int j = 0; j < power.cols(); ++j) acc += std::fabs(power.at(i, j) - pi[j]);
    worst = std::max(worst, 0.5 * acc);
  }
  return worst;
}

}  // namespace

MixingReport mixing_report(const WalkKernel& kernel, int sites,
                           const std::vector<double>& eps_list, const Caps& caps) {
  if (!kernel.square()) throw InputError("mixing report needs a square kernel");
  if (static_cast<std::uint64_t>(kernel.entries.rows()) > caps.max_power_states)
    throw CapExceededError("matrix powering exceeds the state cap", kernel.entries.rows());

  MixingReport report;
  report.sites = sites;
  auto spectrum = reversible_spectrum(kernel);
  auto g = gap(spectrum);
  if (g.reducible || g.absolute_gap <= 1e-9)
    throw NumericsError("non-ergodic kernel: absolute spectral gap is zero");
  report.gamma = g.gamma;
  report.lambda_star = g.lambda_star;
  report.t_relax = 1.0 / (1.0 - g.lambda_star);
  report.psd_min_eigenvalue = spectrum.eigenvalues.back();
  report.mu_star = *std::min_element(kernel.stationary.begin(), kernel.stationary.end());
  report.bound_t_relax = sites / report.gamma;
  report.bound_t_relax_standard = 1.0 / report.gamma;
  report.bound_t_mix = sites / report.gamma * std::log(1.0 / report.mu_star);

  double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
  const auto& pi = kernel.stationary;

  // repeated squaring with renormalization: powers[i] = P^(2^i)
  std::vector<DenseMatrix> powers{kernel.entries};
  auto tv_at = [&](long t) {
    if (t == 0) {
      DenseMatrix id = DenseMatrix::identity(kernel.entries.rows());
      return worst_tv(id, pi);
    }
    DenseMatrix acc;
    bool first = true;
    for (int bit = 0; (1l << bit) <= t; ++bit) {
      if (!(t >> bit & 1)) continue;
      while (bit >= static_cast<int>(powers.size())) {
        DenseMatrix next = multiply(powers.back(), powers.back());
        renormalize_rows(next);
        powers.push_back(std::move(next));
      }
      acc = first ? powers[bit] : multiply(acc, powers[bit]);
      first = false;
    }
    return worst_tv(acc, pi);
  };

  long hi = 1;
  const long power_cap = 1l << 40;
  while (tv_at(hi) > eps_min) {
    hi *= 2;
    if (hi > power_cap) throw NumericsError("mixing-time powering exceeded the iteration cap");
  }

  for (double eps : eps_list) {
    // smallest t with worst-case TV <= eps; TV to stationarity is
    // non-increasing in t, so binary search applies
    long lo = 0, up = hi;
    if (tv_at(0) <= eps) {
      report.t_mix_exact.emplace_back(eps, 0);
      continue;
    }
    while (tv_at(up) > eps) up *= 2;
    while (lo + 1 < up) {
      long mid = lo + (up - lo) / 2;
      if (tv_at(mid) <= eps)
        up = mid;
      else
        lo = mid;
    }
    report.t_mix_exact.emplace_back(eps, up);
  }
  return report;
}

double Trajectory::occupancy() const {
  if (counts.empty()) return 0.0;
  double occupied = 0;
  long total = 0;
  for (const auto& [mask, count] : counts) {
    occupied += static_cast<double>(__builtin_popcount(mask)) * count;
    total += count;
  }
  return occupied / (static_cast<double>(total) * n);
}

std::string Trajectory::to_csv() const {
  std::ostringstream out;
  out << "step,config\n";
  for (std::size_t t = 0; t < states.size(); ++t)
    out << t << "," << SpinConfig{states[t], n}.bitstring() << "\n";
  return out.str();
}

Trajectory simulate_glauber(const Graph& graph, const Rat& activity, long steps,
                            std::uint64_t seed) {
  if (activity <= 0) throw InputError("activity must be positive");
  if (steps < 0) throw InputError("steps must be non-negative");
  Trajectory trajectory;
  trajectory.seed = seed;
  trajectory.n = graph.n();
  trajectory.steps = steps;
  double p_occupied = to_double(activity / (1 + activity));
  Rng rng(seed);
  std::uint32_t state = 0;  // start from the empty configuration
  trajectory.states.reserve(steps + 1);
  trajectory.states.push_back(state);
  for (long t = 0; t < steps; ++t) {
    int v = static_cast<int>(rng.uniform_int(graph.n()));
    bool occupy = rng.bernoulli(p_occupied);
    std::uint32_t proposal = occupy ? (state | (1u << v)) : (state & ~(1u << v));
    // reject proposals leaving the independent-set support
    if (!occupy || !(state & graph.neighbor_mask(v))) state = proposal;
    trajectory.states.push_back(state);
    ++trajectory.counts[state];
  }
  return trajectory;
}

double empirical_tv(const Trajectory& trajectory, const SpinSystem& system) {
  long total = 0;
  for (const auto& [mask, count] : trajectory.counts) total += count;
  if (total == 0) return 1.0;
  double acc = 0;
  for (int i = 0; i < system.size(); ++i) {
    auto it = trajectory.counts.find(system.support()[i]);
    double emp = it == trajectory.counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    acc += std::fabs(emp - system.prob_d(i));
  }
  for (const auto& [mask, count] : trajectory.counts)
    if (system.index_of(mask) < 0) acc += static_cast<double>(count) / total;
  return 0.5 * acc;
}

std::string ShatteringReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["block_size"] = block_size;
  j["alpha"] = alpha;
  j["max_degree"] = max_degree;
  j["exact"] = exact;
  if (!exact) j["samples"] = samples;
  j["bound"] = bound;
  j["prob"] = prob;
  if (!exact) j["ci_halfwidth"] = ci_halfwidth;
  j["all_within_bound"] = all_within_bound;
  j["violations"] = violations;
  return j.dump();
}

namespace {

// component sizes of the subgraph induced on `mask`, per contained vertex
void component_sizes(const Graph& graph, std::uint32_t mask, std::vector<int>& size_of) {
  size_of.assign(graph.n(), 0);
  std::uint32_t remaining = mask;
  while (remaining) {
    int start = __builtin_ctz(remaining);
    std::uint32_t component = 0;
    std::uint32_t frontier = 1u << start;
    while (frontier) {
      component |= frontier;
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f;) {
        int v = __builtin_ctz(f);
        f &= f - 1;
        next |= graph.neighbor_mask(v) & mask & ~component;
      }
      frontier = next;
    }
    int size = __builtin_popcount(component);
    for (std::uint32_t c = component; c;) {
      int v = __builtin_ctz(c);
      c &= c - 1;
      size_of[v] = size;
    }
    remaining &= ~component;
  }
}

}  // namespace

ShatteringReport shattering_check(const Graph& graph, int block_size, const Caps& caps,
                                  std::uint64_t seed, std::uint64_t mc_samples, int threads) {
  int n = graph.n();
  if (block_size < 1 || block_size > n) throw InputError("block size must be in [1, n]");
  if (threads < 1) throw InputError("threads must be >= 1");
  ShatteringReport report;
  report.n = n;
  report.block_size = block_size;
  report.alpha = static_cast<double>(block_size) / n;
  report.max_degree = graph.max_degree();

  report.bound.resize(n);
  for (int k = 1; k <= n; ++k)
    report.bound[k - 1] =
        report.alpha * std::pow(6.0 * report.max_degree * report.alpha, k - 1);

  BigInt subsets = binomial(n, block_size);
  report.exact = subsets <= BigInt(caps.max_subsets_exact);
  std::vector<std::vector<double>> hits(n, std::vector<double>(n, 0.0));
  std::vector<int> size_of;
  double total = 0;

  if (report.exact) {
    std::vector<int> subset(block_size);
    for (int i = 0; i < block_size; ++i) subset[i] = i;
    while (true) {
      std::uint32_t mask = 0;
      for (int v : subset) mask |= 1u << v;
      component_sizes(graph, mask, size_of);
      for (int v = 0; v < n; ++v)
        if (size_of[v] > 0) hits[v][size_of[v] - 1] += 1.0;
      total += 1.0;
      int i = block_size - 1;
      while (i >= 0 && subset[i] == n - block_size + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < block_size; ++j) subset[j] = subset[j - 1] + 1;
    }
  } else {
    report.samples = mc_samples;
    Rng rng(seed);
    std::vector<int> pool(n);
    for (std::uint64_t s = 0; s < mc_samples; ++s) {
      for (int i = 0; i < n; ++i) pool[i] = i;
      std::uint32_t mask = 0;
      for (int i = 0; i < block_size; ++i) {
        int pick = i + static_cast<int>(rng.uniform_int(n - i));
        std::swap(pool[i], pool[pick]);
        mask |= 1u << pool[i];
      }
      component_sizes(graph, mask, size_of);
      for (int v = 0; v < n; ++v)
        if (size_of[v] > 0) hits[v][size_of[v] - 1] += 1.0;
      total += 1.0;
    }
  }

  report.prob.assign(n, std::vector<double>(n, 0.0));
  if (!report.exact) report.ci_halfwidth.assign(n, std::vector<double>(n, 0.0));
  for (int v = 0; v < n; ++v) {
    for (int k = 1; k <= n; ++k) {
      double p = hits[v][k - 1] / total;
      report.prob[v][k - 1] = p;
      double slack = 0;
      if (!report.exact) {
        double ci = 1.96 * std::sqrt(std::max(p * (1 - p), 1e-12) / total);
        report.ci_halfwidth[v][k - 1] = ci;
        slack = ci;
      }
      if (p - slack > report.bound[k - 1]) {
        report.all_within_bound = false;
        report.violations.push_back("v=" + std::to_string(v) + ",k=" + std::to_string(k));
      }
    }
  }
  return report;
}

double entropy(const std::vector<double>& dist, const std::vector<double>& f) {
  if (dist.size() != f.size()) throw InputError("distribution/function dimension mismatch");
  double mean = 0, flogf = 0;
  bool any_positive = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0) throw InputError("entropy requires a non-negative function");
    if (f[i] > 0 && dist[i] > 0) any_positive = true;
    mean += dist[i] * f[i];
    if (f[i] > 0) flogf += dist[i] * f[i] * std::log(f[i]);
  }
  if (!any_positive) throw InputError("entropy of an identically-zero function");
  return flogf - mean * std::log(mean);
}

EntropyRatio entropy_tensorization_ratio(const SpinSystem& system,
                                         const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != system.size())
    throw InputError("function must be indexed by the support");
  EntropyRatio out;
  out.ent = entropy(system.probs_d(), f);
  for (int v = 0; v < system.n(); ++v) {
    // group configurations by the assignment outside v
    std::map<std::uint32_t, std::vector<int>> classes;
    for (int i = 0; i < system.size(); ++i)
      classes[system.support()[i] & ~(1u << v)].push_back(i);
    for (const auto& [key, members] : classes) {
      double mass = 0;
      for (int i : members) mass += system.prob_d(i);
      if (mass <= 0) continue;
      double mean = 0, flogf = 0;
      bool any_positive = false;
      for (int i : members) {
        double w = system.prob_d(i) / mass;
        mean += w * f[i];
        if (f[i] > 0) {
          flogf += w * f[i] * std::log(f[i]);
          any_positive = true;
        }
      }
      if (!any_positive || mean <= 0) continue;  // conditional entropy 0
      out.site_sum += mass * (flogf - mean * std::log(mean));
    }
  }
  if (out.site_sum <= 1e-300) {
    out.degenerate = true;
    out.ratio = 1.0;  // convention for a zero denominator
  } else {
    out.ratio = out.ent / out.site_sum;
  }
  return out;
}

EntropyProbeReport entropy_probe_sweep(const SpinSystem& system, std::uint64_t seed) {
  EntropyProbeReport report;
  Rng rng(seed);
  auto consider = [&](const std::vector<double>& f, bool single_site) {
    auto r = entropy_tensorization_ratio(system, f);
    ++report.probes;
    if (r.degenerate) {
      ++report.degenerate;
      return;
    }
    report.max_ratio = std::max(report.max_ratio, r.ratio);
    if (single_site) report.single_site_ratios.push_back(r.ratio);
  };

  int m = system.size();
  for (int p = 0; p < 32; ++p) {
    std::vector<double> f(m, 1.0 + p * 0.25);
    consider(f, false);  // constants: degenerate by design
  }
  for (int p = 0; p < 32; ++p) {
    int v = p % system.n();
    int s = (p / system.n()) % 2;
    std::vector<double> f(m, 0.1);
    for (int i = 0; i < m; ++i)
      if (system.config(i).spin(v) == s) f[i] = 1.1;
    consider(f, true);
  }
  for (int p = 0; p < 32; ++p) {
    std::vector<double> w(system.n());
    for (auto& x : w) x = rng.normal();
    std::vector<double> f(m);
    for (int i = 0; i < m; ++i) {
      double lin = 0;
      for (int v = 0; v < system.n(); ++v)
        if (system.config(i).spin(v)) lin += w[v];
      f[i] = std::exp(lin);
    }
    consider(f, false);
  }

  double mu_star = *std::min_element(system.probs_d().begin(), system.probs_d().end());
  report.bound_t_mix =
      mu_star < 1.0 ? report.max_ratio * system.n() * std::log(std::log(1.0 / mu_star))
                    : 0.0;
  return report;
}

}  // namespace specmix
