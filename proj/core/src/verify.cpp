#include "specmix/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "specmix/rng.hpp"

namespace specmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CheckSink {
 public:
  explicit CheckSink(std::vector<CheckResult>& out, const Tolerances& tol)
      : out_(out), tol_(tol) {}

  void identity(const std::string& name, const std::string& instance, double deviation,
                double tolerance, const std::string& notes = "") {
    CheckResult r;
    r.name = name;
    r.instance = instance;
    r.lhs = deviation;
    r.rhs = tolerance;
    r.margin = deviation;
    r.pass = deviation <= tolerance;
    r.notes = notes;
    out_.push_back(std::move(r));
  }

  void inequality(const std::string& name, const std::string& instance, double lhs, double rhs,
                  double tolerance, const std::string& notes = "") {
    CheckResult r;
    r.name = name;
    r.instance = instance;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;
    r.pass = r.margin >= -tolerance;
    r.notes = notes;
    out_.push_back(std::move(r));
  }

  void boolean(const std::string& name, const std::string& instance, bool ok,
               const std::string& notes = "") {
    CheckResult r;
    r.name = name;
    r.instance = instance;
    r.margin = ok ? 0.0 : 1.0;
    r.pass = ok;
    r.notes = notes;
    out_.push_back(std::move(r));
  }

  void skip(const std::string& name, const std::string& instance, const std::string& reason) {
    CheckResult r;
    r.name = name;
    r.instance = instance;
    r.pass = true;
    r.skipped = true;
    r.notes = reason;
    out_.push_back(std::move(r));
  }

  const Tolerances& tol() const { return tol_; }

 private:
  std::vector<CheckResult>& out_;
  const Tolerances& tol_;
};

std::vector<std::vector<double>> normal_probes(int count, int dim, std::uint64_t seed,
                                               std::uint64_t stream) {
  Rng rng(seed, stream);
  std::vector<std::vector<double>> probes(count, std::vector<double>(dim));
  for (auto& p : probes)
    for (auto& x : p) x = rng.normal();
  return probes;
}

Face merge_faces(const Face& a, const Face& b) {
  Face out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// multiset equality of the nonzero spectra: pad both with zeros and compare
double nonzero_multiset_deviation(std::vector<double> a, std::vector<double> b) {
  std::size_t dim = a.size() + b.size();
  a.resize(dim, 0.0);
  b.resize(dim, 0.0);
  return multiset_deviation(std::move(a), std::move(b));
}

}  // namespace

bool SuiteReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass || r.skipped; });
}

int SuiteReport::failed() const {
  int c = 0;
  for (const auto& r : results) c += !r.pass && !r.skipped;
  return c;
}

int SuiteReport::skipped() const {
  int c = 0;
  for (const auto& r : results) c += r.skipped;
  return c;
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["descriptor"] = descriptor;
  j["seed"] = seed;
  j["tolerances"] = {{"identity", tolerances.identity},
                     {"identity_tight", tolerances.identity_tight},
                     {"inequality", tolerances.inequality},
                     {"spectrum", tolerances.spectrum}};
  j["all_passed"] = all_passed();
  j["failed"] = failed();
  j["skipped"] = skipped();
  if (!summary_json.empty()) j["summary"] = nlohmann::json::parse(summary_json);
  auto arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json e;
    e["name"] = r.name;
    e["instance"] = r.instance;
    e["lhs"] = r.lhs;
    e["rhs"] = r.rhs;
    e["margin"] = r.margin;
    e["pass"] = r.pass;
    if (r.skipped) e["skipped"] = true;
    if (!r.notes.empty()) e["notes"] = r.notes;
    arr.push_back(std::move(e));
  }
  j["results"] = arr;
  return j.dump(2);
}

std::vector<std::string> spin_check_registry() {
  return {
      "influence-factorization",
      "influence-psd",
      "influence-diagonal",
      "influence-power-iteration",
      "spectral-independence-consistency",
      "local-spectrum-identity",
      "local-gap-eta-bound",
      "updown-downup-spectra",
      "glauber-is-downup",
      "local-updown-halving",
      "updown-local-embedding",
      "down-composition",
      "up-down-reversibility",
      "level-product-identity",
      "rw-product-bound",
      "rw-improved-single",
      "rw-improved-general",
      "block-gap-constant",
      "local-dirichlet-decomposition",
      "downup-local-variance",
      "updown-downup-inequality",
      "variance-difference",
      "two-level-variance",
      "improved-step-inequality",
      "glauber-psd",
      "block-is-downup",
      "poincare",
      "lazy-contraction",
      "mixing-bounds",
      "mixing-boosting",
      "shattering-bound",
      "entropy-tensorization",
  };
}

std::vector<std::string> matroid_check_registry() {
  return {
      "matroid-axioms",
      "bases-equal-size",
      "bases-exchange-gap",
      "bases-exchange-is-downup",
      "bases-exchange-stationarity",
      "rank2-links",
      "trickle-down-recursion",
      "trickle-down-final",
      "link-dirichlet-decomposition",
      "link-expectation-decomposition",
      "link-eigenvector-relation",
      "reliability-dual-direct",
      "dual-involution",
  };
}

namespace {

struct SpinAnalysis {
  const SpinSystem* system = nullptr;
  std::unique_ptr<Levels> levels;
  SIReport si;
  std::vector<LevelGap> gaps;        // k = 0..n-2
  std::vector<double> gamma_k;       // mirrors gaps
  bool any_reducible = false;
  std::vector<DenseMatrix> downup;   // [k] valid 1..n
  std::vector<Spectrum> downup_spec;
  std::vector<DenseMatrix> updown;   // [k] valid 0..n-1
  std::vector<Spectrum> updown_spec;
  std::vector<DenseMatrix> multi;    // [l] = P(down n->l, up l->n), 0..n-1
  std::vector<Spectrum> multi_spec;
  WalkKernel glauber;
  Spectrum glauber_spec;
  double glauber_gamma = 0.0;
  std::vector<WalkKernel> blocks;    // [m-1] for m = 1..n
  std::vector<Spectrum> block_spec;
  MixingReport mixing;
  EntropyProbeReport entropy;
  std::vector<std::vector<std::vector<double>>> probes;  // [level][probe] -> f
};

SpinAnalysis analyze_spin(const SpinSystem& system, std::uint64_t seed, const Caps& caps) {
  SpinAnalysis a;
  a.system = &system;
  a.levels = std::make_unique<Levels>(system, caps);
  const auto& complex = a.levels->complex();
  int n = system.n();

  a.si = spectral_independence(system, caps);
  a.gaps = a.levels->local_gaps();
  for (const auto& g : a.gaps) {
    a.gamma_k.push_back(g.gamma);
    a.any_reducible = a.any_reducible || g.reducible;
  }

  a.downup.resize(n + 1);
  a.downup_spec.resize(n + 1);
  for (int k = 1; k <= n; ++k) {
    a.downup[k] = complex.down_up(k);
    a.downup_spec[k] = reversible_spectrum(a.downup[k], complex.level(k).pi_d);
  }
  a.updown.resize(n);
  a.updown_spec.resize(n);
  for (int k = 0; k <= n - 1; ++k) {
    a.updown[k] = complex.up_down(k);
    a.updown_spec[k] = reversible_spectrum(a.updown[k], complex.level(k).pi_d);
  }
  a.multi.resize(n);
  a.multi_spec.resize(n);
  for (int l = 0; l <= n - 1; ++l) {
    a.multi[l] = complex.down_up_multi(n, l);
    a.multi_spec[l] = reversible_spectrum(a.multi[l], complex.level(n).pi_d);
  }

  a.glauber = glauber_kernel(system, caps);
  a.glauber_spec = reversible_spectrum(a.glauber);
  a.glauber_gamma = gap(a.glauber_spec).gamma;
  for (int m = 1; m <= n; ++m) {
    a.blocks.push_back(block_kernel(system, m, caps));
    a.block_spec.push_back(reversible_spectrum(a.blocks.back()));
  }
  a.mixing = mixing_report(a.glauber, n, {0.25, 0.125, 0.0625}, caps);
  a.entropy = entropy_probe_sweep(system, seed);

  a.probes.resize(n + 1);
  for (int k = 0; k <= n; ++k)
    a.probes[k] = normal_probes(32, complex.level(k).size(), seed, k);
  return a;
}

void check_influence(const SpinAnalysis& a, CheckSink& sink, const Caps& caps) {
  const auto& system = *a.system;
  int n = system.n();
  for (int k = 0; k <= n; ++k) {
    double worst_fact = 0, worst_psd = kInf, worst_diag = 0, worst_power = 0;
    bool any = false, any_psd = false, any_power = false;
    std::string fact_witness, psd_witness;
    for (const auto& tau : enumerate_pinnings(system, k, caps)) {
      auto split = free_frozen_split(system, tau);
      int f = static_cast<int>(split.free_vertices.size());
      if (f == 0) continue;
      any = true;
      auto psi = influence_matrix(system, tau);
      auto cov = covariance_matrix(system, tau);
      auto marginals = free_marginals_exact(system, tau);
      // factorization: Psi = D^{-1} Cov
      for (int i = 0; i < f; ++i) {
        double d = to_double(marginals[i] * (1 - marginals[i]));
        for (int j = 0; j < f; ++j) {
          double dev = std::fabs(psi.entries.at(i, j) - cov.at(i, j) / d);
          if (dev > worst_fact) {
            worst_fact = dev;
            fact_witness = tau.to_string();
          }
        }
        worst_diag = std::max(worst_diag, std::fabs(psi.entries.at(i, i) - 1.0));
      }
      if (f >= 1) {
        auto spectrum = influence_spectrum(system, tau);
        any_psd = true;
        if (spectrum.eigenvalues.back() < worst_psd) {
          worst_psd = spectrum.eigenvalues.back();
          psd_witness = tau.to_string();
        }
        if (f >= 2) {
          double separation = spectrum.eigenvalues[0] - spectrum.eigenvalues[1];
          if (separation > 1e-6) {
            // independent oracle: power iteration on D^{-1} Cov
            DenseMatrix dinv_cov(f, f);
            for (int i = 0; i < f; ++i) {
              double d = to_double(marginals[i] * (1 - marginals[i]));
              for (int j = 0; j < f; ++j) dinv_cov.at(i, j) = cov.at(i, j) / d;
            }
            double oracle = power_iteration_max_eigenvalue(dinv_cov);
            worst_power = std::max(worst_power, std::fabs(oracle - spectrum.eigenvalues[0]));
            any_power = true;
          }
        }
      }
    }
    std::string key = "k=" + std::to_string(k);
    if (!any) {
      sink.skip("influence-factorization", key, "no pinnings with free vertices");
      sink.skip("influence-psd", key, "no pinnings with free vertices");
      sink.skip("influence-diagonal", key, "no pinnings with free vertices");
      sink.skip("influence-power-iteration", key, "no pinnings with free vertices");
      continue;
    }
    sink.identity("influence-factorization", key, worst_fact, sink.tol().identity_tight,
                  "worst pinning {" + fact_witness + "}");
    if (any_psd)
      sink.inequality("influence-psd", key, worst_psd, 0.0, 1e-10,
                      "worst pinning {" + psd_witness + "}");
    sink.identity("influence-diagonal", key, worst_diag, 0.0);
    if (any_power)
      sink.identity("influence-power-iteration", key, worst_power, sink.tol().spectrum);
    else
      sink.skip("influence-power-iteration", key, "no pinning with spectral separation > 1e-6");
  }
  // eta consistency with the per-pinning table
  double max_lambda = 1.0;
  for (const auto& e : a.si.per_pinning)
    if (e.free_count >= 2) max_lambda = std::max(max_lambda, e.lambda_max);
  double dev = std::fabs(a.si.eta - std::max(max_lambda - 1.0, 0.0));
  bool nonneg = a.si.eta >= 0;
  sink.identity("spectral-independence-consistency", "global", nonneg ? dev : kInf, 1e-10,
                "eta=" + std::to_string(a.si.eta) + ", b=" + std::to_string(a.si.b));
}

void check_local_walks(const SpinAnalysis& a, CheckSink& sink, const Caps& caps) {
  const auto& system = *a.system;
  const auto& complex = a.levels->complex();
  int n = system.n();
  for (int k = 0; k <= n - 2; ++k) {
    double worst = 0;
    std::string witness;
    bool any = false;
    for (const auto& face : complex.level(k).faces) {
      Pinning tau = face_to_pinning(face);
      auto split = free_frozen_split(system, tau);
      if (static_cast<int>(split.free_vertices.size()) < 2) continue;
      any = true;
      auto walk = complex.local_walk(face);
      auto q_spec = reversible_spectrum(walk.kernel, walk.stationary);
      auto psi_spec = influence_spectrum(system, tau);
      std::vector<double> expected;
      double denom = n - k - 1;
      for (double ev : psi_spec.eigenvalues) expected.push_back((ev - 1.0) / denom);
      expected.push_back(1.0);
      for (int c = 0; c < n - k - 1; ++c) expected.push_back(-1.0 / denom);
      double dev = multiset_deviation(q_spec.eigenvalues, expected);
      if (dev > worst) {
        worst = dev;
        witness = tau.to_string();
      }
    }
    std::string key = "k=" + std::to_string(k);
    if (!any)
      sink.skip("local-spectrum-identity", key, "no pinning with >= 2 free vertices");
    else
      sink.identity("local-spectrum-identity", key, worst, sink.tol().spectrum,
                    "worst pinning {" + witness + "}");
  }
  (void)caps;
  // gamma_k >= 1 - eta/(n-k-1)
  for (int k = 0; k <= n - 2; ++k) {
    sink.inequality("local-gap-eta-bound", "k=" + std::to_string(k), a.gamma_k[k],
                    1.0 - a.si.eta / (n - k - 1), sink.tol().inequality,
                    "worst pinning {" + a.gaps[k].witness.to_string() + "}");
  }
}

void check_level_identities(const SpinAnalysis& a, CheckSink& sink) {
  const auto& complex = a.levels->complex();
  int n = a.system->n();

  // nonzero spectra of updown(k-1) and downup(k) agree
  for (int k = 1; k <= n; ++k) {
    double dev = nonzero_multiset_deviation(a.updown_spec[k - 1].eigenvalues,
                                            a.downup_spec[k].eigenvalues);
    sink.identity("updown-downup-spectra", "k=" + std::to_string(k), dev, sink.tol().spectrum);
  }

  // glauber equals the top-level down-up walk
  {
    auto glauber_dev = max_abs_diff(a.glauber.entries, a.downup[n]);
    sink.identity("glauber-is-downup", "global", glauber_dev, sink.tol().identity_tight);
  }

  // updown at level 1 is the lazy local walk
  if (n >= 2) {
    auto walk = complex.local_walk({});
    int m = walk.kernel.rows();
    DenseMatrix expected(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        expected.at(i, j) = 0.5 * walk.kernel.at(i, j) + (i == j ? 0.5 : 0.0);
    sink.identity("local-updown-halving", "global", max_abs_diff(a.updown[1], expected),
                  sink.tol().identity_tight);
  } else {
    sink.skip("local-updown-halving", "global", "needs n >= 2");
  }

  // scaled embedding of the local walk inside updown(k)
  for (int k = 1; k <= n - 1; ++k) {
    double worst = 0;
    const auto& lower = complex.level(k - 1);
    const auto& level = complex.level(k);
    for (const auto& eta : lower.faces) {
      auto walk = complex.local_walk(eta);
      int m = static_cast<int>(walk.states.size());
      for (int i = 0; i < m; ++i) {
        int row = level.find(merge_faces(eta, {walk.states[i]}));
        for (int j = 0; j < m; ++j) {
          if (i == j) continue;
          int col = level.find(merge_faces(eta, {walk.states[j]}));
          double expected = walk.kernel.at(i, j) / (k + 1);
          worst = std::max(worst, std::fabs(a.updown[k].at(row, col) - expected));
        }
      }
    }
    sink.identity("updown-local-embedding", "k=" + std::to_string(k), worst,
                  sink.tol().identity_tight);
  }

  // pi_k P_down = pi_{k-1}
  for (int k = 1; k <= n; ++k) {
    auto pushed = multiply(complex.level(k).pi_d, complex.down_kernel(k));
    double worst = 0;
    for (int i = 0; i < complex.level(k - 1).size(); ++i)
      worst = std::max(worst, std::fabs(pushed[i] - complex.level(k - 1).pi_d[i]));
    sink.identity("down-composition", "k=" + std::to_string(k), worst,
                  sink.tol().identity_tight);
  }

  // pi_k(tau) P_up(tau,sigma) = pi_{k+1}(sigma) P_down(sigma,tau)
  for (int k = 0; k <= n - 1; ++k) {
    const auto& up = complex.up_kernel(k);
    const auto& down = complex.down_kernel(k + 1);
    double worst = 0;
    for (int i = 0; i < up.rows(); ++i)
      for (int j = 0; j < up.cols(); ++j)
        worst = std::max(worst, std::fabs(complex.level(k).pi_d[i] * up.at(i, j) -
                                          complex.level(k + 1).pi_d[j] * down.at(j, i)));
    sink.identity("up-down-reversibility", "k=" + std::to_string(k), worst,
                  sink.tol().identity_tight);
  }

  // pi_k(eta+a) = k pi_{k-1}(eta) pi_{eta,1}(a), exactly in rationals
  for (int k = 1; k <= n; ++k) {
    bool exact = true;
    std::string witness;
    const auto& lower = complex.level(k - 1);
    const auto& level = complex.level(k);
    for (const auto& eta : lower.faces) {
      auto link = complex.link_level(eta, 1);
      Rat pi_eta = lower.pi[lower.find(eta)];
      for (std::size_t s = 0; s < link.faces.size(); ++s) {
        Face whole = merge_faces(eta, link.faces[s]);
        Rat lhs = level.pi[level.find(whole)];
        Rat rhs = Rat(k) * pi_eta * link.pi_exact[s];
        if (lhs != rhs) {
          exact = false;
          witness = face_to_string(whole);
        }
      }
    }
    sink.identity("level-product-identity", "k=" + std::to_string(k), exact ? 0.0 : kInf,
                  sink.tol().identity_tight, exact ? "exact" : "mismatch at " + witness);
  }
}

void check_random_walk_theorems(const SpinAnalysis& a, CheckSink& sink) {
  int n = a.system->n();
  const auto& gamma = a.gamma_k;

  // gamma(downup k) >= (1/k) prod_{i<=k-2} gamma_i
  for (int k = 2; k <= n; ++k) {
    std::string key = "k=" + std::to_string(k);
    if (a.any_reducible) {
      sink.skip("rw-product-bound", key, "reducible local walk; product bound vacuous");
      continue;
    }
    double product = 1.0;
    for (int i = 0; i <= k - 2; ++i) product *= gamma[i];
    sink.inequality("rw-product-bound", key, gap(a.downup_spec[k]).gamma, product / k,
                    sink.tol().inequality);
  }
  if (n < 2) sink.skip("rw-product-bound", "global", "needs n >= 2");

  // Gamma_i = prod_{j<i} (2 gamma_j - 1)
  std::vector<double> big_gamma{1.0};
  std::vector<bool> vacuous{false};
  bool dead = false;
  for (int i = 1; i <= n - 1; ++i) {
    dead = dead || 2 * gamma[i - 1] - 1 <= 0;
    big_gamma.push_back(big_gamma.back() * (2 * gamma[i - 1] - 1));
    vacuous.push_back(dead);
  }

  for (int k = 1; k <= n; ++k) {
    std::string key = "k=" + std::to_string(k);
    if (vacuous[std::min(k - 1, n - 1)]) {
      sink.skip("rw-improved-single", key, "vacuous: some 2*gamma_j - 1 <= 0");
      continue;
    }
    double denom = 0;
    for (int i = 0; i <= k - 1; ++i) denom += big_gamma[i];
    sink.inequality("rw-improved-single", key, gap(a.downup_spec[k]).gamma,
                    big_gamma[k - 1] / denom, sink.tol().inequality);
  }

  double total = 0;
  bool any_vacuous = vacuous.back();
  for (double g : big_gamma) total += g;
  for (int l = 0; l <= n - 1; ++l) {
    std::string key = "l=" + std::to_string(l);
    if (any_vacuous) {
      sink.skip("rw-improved-general", key, "vacuous: some 2*gamma_j - 1 <= 0");
      continue;
    }
    double tail = 0;
    for (int i = l; i <= n - 1; ++i) tail += big_gamma[i];
    sink.inequality("rw-improved-general", key, gap(a.multi_spec[l]).gamma, tail / total,
                    sink.tol().inequality);
  }

  // uniform-block gap lower bound (alpha/2) exp(-8 eta / alpha), under the
  // hypothesis n >= 8 eta / alpha
  for (int m = 1; m <= n; ++m) {
    std::string key = "m=" + std::to_string(m);
    double alpha = static_cast<double>(m) / n;
    if (n < 8.0 * a.si.eta / alpha) {
      sink.skip("block-gap-constant", key, "hypothesis n >= 8*eta/alpha not met");
      continue;
    }
    double bound = alpha / 2.0 * std::exp(-8.0 * a.si.eta / alpha);
    sink.inequality("block-gap-constant", key, gap(a.multi_spec[n - m]).gamma, bound,
                    sink.tol().inequality);
  }
}

void check_probe_identities(const SpinAnalysis& a, CheckSink& sink) {
  const auto& complex = a.levels->complex();
  int n = a.system->n();

  // claims: dirichlet/variance decompositions over local walks
  for (int k = 1; k <= n - 1; ++k) {
    std::string key = "k=" + std::to_string(k);
    const auto& lower = complex.level(k - 1);
    const auto& level = complex.level(k);
    // local walks and the index of eta+a in level k, hoisted out of the probe loop
    std::vector<FaceComplex::LocalWalk> walks;
    std::vector<std::vector<int>> state_index(lower.size());
    walks.reserve(lower.size());
    for (int e = 0; e < lower.size(); ++e) walks.push_back(complex.local_walk(lower.faces[e]));
    for (int e = 0; e < lower.size(); ++e) {
      state_index[e].resize(walks[e].states.size());
      for (std::size_t s = 0; s < walks[e].states.size(); ++s)
        state_index[e][s] = level.find(merge_faces(lower.faces[e], {walks[e].states[s]}));
    }
    double worst_aaa = 0, worst_ddd = 0, worst_tech = kInf;
    for (const auto& f : a.probes[k]) {
      double e_updown = dirichlet(a.updown[k], level.pi_d, f);
      double e_downup = dirichlet(a.downup[k], level.pi_d, f);
      double local_dirichlet = 0, local_variance = 0;
      for (int e = 0; e < lower.size(); ++e) {
        const auto& walk = walks[e];
        std::vector<double> f_eta(walk.states.size());
        for (std::size_t s = 0; s < walk.states.size(); ++s) f_eta[s] = f[state_index[e][s]];
        local_dirichlet +=
            lower.pi_d[e] * dirichlet(walk.kernel, walk.stationary, f_eta);
        local_variance += lower.pi_d[e] * variance(walk.stationary, f_eta);
      }
      double ratio = static_cast<double>(k) / (k + 1);
      worst_aaa = std::max(worst_aaa, std::fabs(e_updown - ratio * local_dirichlet));
      worst_ddd = std::max(worst_ddd, std::fabs(e_downup - local_variance));
      worst_tech = std::min(worst_tech, e_updown - ratio * a.gamma_k[k - 1] * e_downup);
    }
    sink.identity("local-dirichlet-decomposition", key, worst_aaa, sink.tol().identity);
    sink.identity("downup-local-variance", key, worst_ddd, sink.tol().identity);
    sink.inequality("updown-downup-inequality", key, worst_tech, 0.0, sink.tol().identity);
  }

  // dirichlet form of the multi-level down-up walk telescopes the variance
  for (int i = 1; i <= n; ++i) {
    for (int j = i - 1; j >= 0; --j) {
      std::string key = "i=" + std::to_string(i) + ",j=" + std::to_string(j);
      DenseMatrix kernel = j == i - 1 ? a.downup[i] : complex.down_up_multi(i, j);
      double worst = 0;
      for (const auto& f : a.probes[i]) {
        double lhs = dirichlet(kernel, complex.level(i).pi_d, f);
        std::vector<double> cur = f;
        double var_i = variance(complex.level(i).pi_d, cur);
        for (int k = i - 1; k >= j; --k) cur = complex.project(k, cur);
        double var_j = variance(complex.level(j).pi_d, cur);
        worst = std::max(worst, std::fabs(lhs - (var_i - var_j)));
      }
      sink.identity("variance-difference", key, worst, sink.tol().identity);
    }
  }

  // two-level variance decomposition over links, and the improved step
  for (int k = 1; k <= n - 1; ++k) {
    std::string key = "k=" + std::to_string(k);
    const auto& top = complex.level(k + 1);
    const auto& lower = complex.level(k - 1);
    // two-level links above each face of level k-1, hoisted
    std::vector<FaceComplex::LinkLevel> links;
    std::vector<std::vector<int>> link_index(lower.size());
    links.reserve(lower.size());
    for (int e = 0; e < lower.size(); ++e) {
      links.push_back(complex.link_level(lower.faces[e], 2));
      link_index[e].resize(links[e].faces.size());
      for (std::size_t s = 0; s < links[e].faces.size(); ++s)
        link_index[e][s] = top.find(merge_faces(lower.faces[e], links[e].faces[s]));
    }
    double worst_var2 = 0, worst_step = kInf;
    for (const auto& g : a.probes[k + 1]) {
      auto f_k = complex.project(k, g);
      auto f_km1 = complex.project(k - 1, f_k);
      double lhs = variance(top.pi_d, g) - variance(lower.pi_d, f_km1);
      double rhs = 0;
      for (int e = 0; e < lower.size(); ++e) {
        std::vector<double> g_tau(links[e].faces.size());
        for (std::size_t s = 0; s < links[e].faces.size(); ++s) g_tau[s] = g[link_index[e][s]];
        rhs += lower.pi_d[e] * variance(links[e].pi, g_tau);
      }
      worst_var2 = std::max(worst_var2, std::fabs(lhs - rhs));

      double e_up = dirichlet(a.downup[k + 1], top.pi_d, g);
      double e_low = dirichlet(a.downup[k], complex.level(k).pi_d, f_k);
      worst_step = std::min(worst_step, e_up - (2 * a.gamma_k[k - 1] - 1) * e_low);
    }
    sink.identity("two-level-variance", key, worst_var2, sink.tol().identity);
    sink.inequality("improved-step-inequality", key, worst_step, 0.0, sink.tol().identity);
  }
}

void check_dynamics(const SpinAnalysis& a, CheckSink& sink, std::uint64_t seed,
                    const Caps& caps) {
  const auto& complex = a.levels->complex();
  int n = a.system->n();

  // positive semidefiniteness of the heat-bath kernels
  double min_eig = a.glauber_spec.eigenvalues.back();
  for (const auto& spec : a.block_spec) min_eig = std::min(min_eig, spec.eigenvalues.back());
  sink.inequality("glauber-psd", "glauber+blocks", min_eig, 0.0, 1e-9);

  // block dynamics equals the multi-level down-up walk
  for (int m = 1; m <= n; ++m)
    sink.identity("block-is-downup", "m=" + std::to_string(m),
                  max_abs_diff(a.blocks[m - 1].entries, a.multi[n - m]),
                  sink.tol().identity_tight);

  // Poincare inequality with equality at the second eigenvector
  {
    double worst = kInf;
    for (const auto& f : a.probes[n]) {
      double margin = dirichlet(a.glauber, f) - a.glauber_gamma * variance(a.glauber.stationary, f);
      worst = std::min(worst, margin);
    }
    auto eig = reversible_eigen(a.glauber);
    int dim = a.glauber.entries.rows();
    std::vector<double> f2(dim);
    for (int i = 0; i < dim; ++i)
      f2[i] = eig.eigenvectors.at(i, 1) / std::sqrt(a.glauber.stationary[i]);
    double var2 = variance(a.glauber.stationary, f2);
    double attained = std::fabs(dirichlet(a.glauber, f2) - a.glauber_gamma * var2);
    bool pass = worst >= -sink.tol().identity && attained <= 1e-6 * std::max(1.0, var2);
    sink.boolean("poincare", "global", pass,
                 "min margin " + std::to_string(worst) + ", eigvec residual " +
                     std::to_string(attained));
  }

  // variance contraction of the lazy chain
  {
    auto lazy_kernel = lazy(a.glauber);
    double worst = kInf;
    for (const auto& f : a.probes[n]) {
      double var = variance(a.glauber.stationary, f);
      auto pf = apply_kernel(lazy_kernel, f);
      double contracted = variance(a.glauber.stationary, pf);
      worst = std::min(worst, (1 - a.glauber_gamma / 2) * var - contracted);
    }
    sink.inequality("lazy-contraction", "global", worst, 0.0, sink.tol().identity);
  }

  // verbatim relaxation/mixing bounds and boosting
  {
    const auto& mr = a.mixing;
    double margin_mix = mr.bound_t_mix - static_cast<double>(mr.t_mix(0.25));
    double margin_relax = mr.bound_t_relax - mr.t_relax;
    sink.inequality("mixing-bounds", "global", std::min(margin_mix, margin_relax), 0.0,
                    sink.tol().inequality,
                    "t_mix(1/4)=" + std::to_string(mr.t_mix(0.25)) +
                        ", bound=" + std::to_string(mr.bound_t_mix) + ", t_relax=" +
                        std::to_string(mr.t_relax) + ", n/gamma=" +
                        std::to_string(mr.bound_t_relax) + ", t_relax/n=" +
                        std::to_string(mr.t_relax / n));
    long base = mr.t_mix(0.25);
    bool boost_ok = mr.t_mix(0.125) <= base * 3 && mr.t_mix(0.0625) <= base * 4;
    sink.boolean("mixing-boosting", "global", boost_ok,
                 "t_mix(1/8)=" + std::to_string(mr.t_mix(0.125)) + ", t_mix(1/16)=" +
                     std::to_string(mr.t_mix(0.0625)));
  }

  // shattering bound for every integer block size
  if (n <= 12) {
    bool all_ok = true;
    std::string violations;
    for (int m = 1; m <= n; ++m) {
      auto report = shattering_check(a.system->graph(), m, caps, seed);
      if (!report.all_within_bound) {
        all_ok = false;
        violations += "m=" + std::to_string(m) + ":" + report.violations.front() + ";";
      }
    }
    sink.boolean("shattering-bound", "all-block-sizes", all_ok, violations);
  } else {
    sink.skip("shattering-bound", "all-block-sizes", "exact enumeration capped at n <= 12");
  }

  // entropy functional: zero on constants, finite probe ratios, product
  // calibration, and the verbatim optimal-mixing bound reported
  {
    std::vector<double> ones(a.system->size(), 1.0);
    double ent_const = entropy(a.system->probs_d(), ones);
    bool product = a.system->graph().edges().empty();
    bool single_site_ok = true;
    double worst_single = 0;
    if (product) {
      for (double r : a.entropy.single_site_ratios) {
        worst_single = std::max(worst_single, std::fabs(r - 1.0));
        single_site_ok = single_site_ok && std::fabs(r - 1.0) <= 1e-9;
      }
    }
    bool ok = std::fabs(ent_const) <= 1e-12 && std::isfinite(a.entropy.max_ratio) &&
              (!product || single_site_ok);
    sink.boolean("entropy-tensorization", "global", ok,
                 "max_ratio=" + std::to_string(a.entropy.max_ratio) +
                     (product ? ", single-site dev=" + std::to_string(worst_single) : "") +
                     ", C*n*loglog(1/mu*)=" + std::to_string(a.entropy.bound_t_mix) +
                     " vs t_mix(1/4)=" + std::to_string(a.mixing.t_mix(0.25)) +
                     " (reported, not asserted)");
  }
  (void)complex;
}

std::string spin_summary(const SpinAnalysis& a) {
  nlohmann::json j;
  j["n"] = a.system->n();
  j["support"] = a.system->size();
  j["eta"] = a.si.eta;
  j["b"] = a.si.b;
  j["gamma_k"] = a.gamma_k;
  j["glauber_gamma"] = a.glauber_gamma;
  j["t_relax"] = a.mixing.t_relax;
  j["t_relax_over_n"] = a.mixing.t_relax / a.system->n();
  j["mu_star"] = a.mixing.mu_star;
  j["t_mix_quarter"] = a.mixing.t_mix(0.25);
  j["entropy_max_ratio"] = a.entropy.max_ratio;
  return j.dump();
}

}  // namespace

SuiteReport run_spin_suite(const SpinSystem& system, std::uint64_t seed, const Caps& caps,
                           const std::string& descriptor) {
  SuiteReport report;
  report.descriptor = descriptor.empty()
                          ? "spin(n=" + std::to_string(system.n()) + ")"
                          : descriptor;
  report.seed = seed;
  CheckSink sink(report.results, report.tolerances);

  auto analysis = analyze_spin(system, seed, caps);
  check_influence(analysis, sink, caps);
  check_local_walks(analysis, sink, caps);
  check_level_identities(analysis, sink);
  check_random_walk_theorems(analysis, sink);
  check_probe_identities(analysis, sink);
  check_dynamics(analysis, sink, seed, caps);
  report.summary_json = spin_summary(analysis);

  // every registered check appears, even when vacuous at this size
  std::set<std::string> present;
  for (const auto& r : report.results) present.insert(r.name);
  for (const auto& name : spin_check_registry())
    if (!present.count(name)) sink.skip(name, "global", "not applicable at this size");

  std::sort(report.results.begin(), report.results.end(),
            [](const CheckResult& x, const CheckResult& y) {
              return std::tie(x.name, x.instance) < std::tie(y.name, y.instance);
            });
  return report;
}

SuiteReport run_matroid_suite(const Matroid& matroid, std::uint64_t seed, const Caps& caps,
                              const std::string& descriptor) {
  SuiteReport report;
  report.descriptor = descriptor.empty() ? matroid.describe() : descriptor;
  report.seed = seed;
  CheckSink sink(report.results, report.tolerances);

  auto axioms = axioms_check(matroid, caps);
  sink.boolean("matroid-axioms", "global", axioms.downward_closed && axioms.exchange,
               axioms.witness);
  sink.boolean("bases-equal-size", "global", axioms.bases_equal_size, axioms.witness);

  if (!axioms.downward_closed || !axioms.exchange || !axioms.bases_equal_size) {
    // not a matroid: walk-level checks are not meaningful
    for (const auto& name : matroid_check_registry())
      if (name != "matroid-axioms" && name != "bases-equal-size")
        sink.skip(name, "global", "axioms failed; downstream checks skipped");
    std::sort(report.results.begin(), report.results.end(),
              [](const CheckResult& x, const CheckResult& y) {
                return std::tie(x.name, x.instance) < std::tie(y.name, y.instance);
              });
    return report;
  }

  auto all_bases = bases(matroid, caps);
  int r = all_bases.rank;
  auto complex = matroid_complex(matroid, caps);

  {
    auto kernel = bases_exchange_kernel(matroid, caps);
    auto spectrum = reversible_spectrum(kernel);
    sink.inequality("bases-exchange-gap", "global", gap(spectrum).gamma, 1.0 / r,
                    sink.tol().inequality,
                    "gamma=" + std::to_string(gap(spectrum).gamma));
    sink.identity("bases-exchange-is-downup", "global",
                  max_abs_diff(kernel.entries, complex.down_up(r)),
                  sink.tol().identity_tight);
    auto pushed = multiply(kernel.stationary, kernel.entries);
    double worst = 0;
    for (std::size_t i = 0; i < pushed.size(); ++i)
      worst = std::max(worst, std::fabs(pushed[i] - kernel.stationary[i]));
    sink.identity("bases-exchange-stationarity", "global", worst, sink.tol().identity_tight);
  }

  if (r >= 2) {
    double worst_lambda2 = -kInf;
    std::string witness;
    for (const auto& face : complex.level(r - 2).faces) {
      auto walk = complex.local_walk(face);
      auto spectrum = reversible_spectrum(walk.kernel, walk.stationary);
      double l2 = spectrum.eigenvalues.size() > 1 ? spectrum.eigenvalues[1] : 0.0;
      if (l2 > worst_lambda2) {
        worst_lambda2 = l2;
        witness = face_to_string(face);
      }
    }
    sink.inequality("rank2-links", "level=" + std::to_string(r - 2), 0.0, worst_lambda2,
                    sink.tol().inequality, "worst link " + witness);
  } else {
    sink.skip("rank2-links", "global", "rank below 2");
  }

  {
    auto trickle = trickle_down_certify(matroid, caps, report.tolerances.inequality);
    if (trickle.aborted) {
      sink.boolean("trickle-down-recursion", "global", false,
                   "reducible link " + face_to_string(trickle.reducible_witness));
      sink.boolean("trickle-down-final", "global", false,
                   "reducible link " + face_to_string(trickle.reducible_witness));
    } else if (trickle.levels.empty()) {
      sink.skip("trickle-down-recursion", "global", "rank below 2");
      sink.skip("trickle-down-final", "global", "rank below 2");
    } else {
      if (trickle.levels.size() < 2)
        sink.skip("trickle-down-recursion", "global", "single link level");
      else
        sink.inequality("trickle-down-recursion", "global",
                        trickle.worst_recursion_margin, 0.0, sink.tol().inequality);
      sink.inequality("trickle-down-final", "global", trickle.worst_final_margin, 0.0,
                      sink.tol().inequality);
    }
  }

  // link decompositions of the Dirichlet form and expectation
  {
    Rng rng(seed, 7);
    std::vector<std::vector<double>> probes(32, std::vector<double>(matroid.ground_size()));
    for (auto& p : probes)
      for (auto& x : p) x = rng.normal();

    for (int level = 0; level <= r - 2; ++level) {
      std::string key = "level=" + std::to_string(level);
      double worst_dir = 0, worst_exp = 0;
      bool dirichlet_applicable = level <= r - 3;
      for (const auto& face : complex.level(level).faces) {
        auto walk = complex.local_walk(face);
        // links and inner walks above each extension, hoisted out of probes
        std::vector<FaceComplex::LinkLevel> links;
        std::vector<FaceComplex::LocalWalk> inner_walks;
        for (std::size_t s = 0; s < walk.states.size(); ++s) {
          Face extended = merge_faces(face, {walk.states[s]});
          links.push_back(complex.link_level(extended, 1));
          if (dirichlet_applicable) inner_walks.push_back(complex.local_walk(extended));
        }
        for (const auto& probe : probes) {
          std::vector<double> f(walk.states.size());
          for (std::size_t s = 0; s < walk.states.size(); ++s) f[s] = probe[walk.states[s]];
          double lhs_exp = expectation(walk.stationary, f);
          double rhs_exp = 0;
          double lhs_dir = dirichlet(walk.kernel, walk.stationary, f);
          double rhs_dir = 0;
          for (std::size_t s = 0; s < walk.states.size(); ++s) {
            const auto& link = links[s];
            double ex = 0;
            for (std::size_t b = 0; b < link.faces.size(); ++b)
              ex += link.pi[b] * probe[link.faces[b][0]];
            rhs_exp += walk.stationary[s] * ex;
            if (dirichlet_applicable) {
              const auto& inner = inner_walks[s];
              std::vector<double> g(inner.states.size());
              for (std::size_t t = 0; t < inner.states.size(); ++t)
                g[t] = probe[inner.states[t]];
              rhs_dir += walk.stationary[s] * dirichlet(inner.kernel, inner.stationary, g);
            }
          }
          worst_exp = std::max(worst_exp, std::fabs(lhs_exp - rhs_exp));
          if (dirichlet_applicable)
            worst_dir = std::max(worst_dir, std::fabs(lhs_dir - rhs_dir));
        }
      }
      sink.identity("link-expectation-decomposition", key, worst_exp, sink.tol().identity);
      if (dirichlet_applicable)
        sink.identity("link-dirichlet-decomposition", key, worst_dir, sink.tol().identity);
      else
        sink.skip("link-dirichlet-decomposition", key, "needs |S| <= rank-3");
    }
    if (r < 2) {
      sink.skip("link-expectation-decomposition", "global", "rank below 2");
      sink.skip("link-dirichlet-decomposition", "global", "rank below 2");
    }
  }

  // second eigenvector of each local walk against the averaged extension
  if (r >= 2) {
    double worst = 0;
    std::string witness;
    for (int level = 0; level <= r - 2; ++level) {
      for (const auto& face : complex.level(level).faces) {
        auto walk = complex.local_walk(face);
        if (walk.states.size() < 2) continue;
        auto eig = reversible_eigen(walk.kernel, walk.stationary);
        int m = static_cast<int>(walk.states.size());
        std::vector<double> fstar(m);
        double scale = 0;
        for (int i = 0; i < m; ++i) {
          fstar[i] = eig.eigenvectors.at(i, 1) / std::sqrt(walk.stationary[i]);
          scale = std::max(scale, std::fabs(fstar[i]));
        }
        for (auto& x : fstar) x /= scale;
        double lambda2 = eig.eigenvalues[1];
        for (int i = 0; i < m; ++i) {
          Face extended = merge_faces(face, {walk.states[i]});
          auto link = complex.link_level(extended, 1);
          double ex = 0;
          for (std::size_t b = 0; b < link.faces.size(); ++b) {
            int state = walk.find_state(link.faces[b][0]);
            ex += link.pi[b] * fstar[state];
          }
          double dev = std::fabs(ex - lambda2 * fstar[i]);
          if (dev > worst) {
            worst = dev;
            witness = face_to_string(face);
          }
        }
      }
    }
    sink.identity("link-eigenvector-relation", "global", worst, sink.tol().spectrum,
                  "worst link " + witness);
  } else {
    sink.skip("link-eigenvector-relation", "global", "rank below 2");
  }

  {
    bool all_match = true;
    std::string values;
    for (const char* p : {"1/4", "1/2", "3/4"}) {
      auto rel = reliability(matroid, parse_rational(p), caps);
      all_match = all_match && rel.match;
      values += std::string(p) + "->" + format_rational(rel.dual_formula) + " ";
    }
    sink.boolean("reliability-dual-direct", "p=1/4,1/2,3/4", all_match, values);
  }

  {
    auto double_dual = bases(dual(dual(matroid)), caps);
    sink.boolean("dual-involution", "global", double_dual.bases == all_bases.bases);
  }

  nlohmann::json j;
  j["ground"] = matroid.ground_size();
  j["rank"] = r;
  j["bases"] = all_bases.bases.size();
  report.summary_json = j.dump();

  std::set<std::string> present;
  for (const auto& res : report.results) present.insert(res.name);
  for (const auto& name : matroid_check_registry())
    if (!present.count(name)) sink.skip(name, "global", "not applicable");

  std::sort(report.results.begin(), report.results.end(),
            [](const CheckResult& x, const CheckResult& y) {
              return std::tie(x.name, x.instance) < std::tie(y.name, y.instance);
            });
  return report;
}

SweepConfig SweepConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("sweep config parse error: ") + e.what());
  }
  SweepConfig config;
  config.seed = j.value("seed", 1);
  std::uint64_t er_counter = 0;
  for (const auto& entry : j.value("spin", nlohmann::json::array())) {
    std::vector<std::string> lambdas;
    for (const auto& l : entry.value("lambda", nlohmann::json::array({"1"})))
      lambdas.push_back(l.is_string() ? l.get<std::string>() : l.dump());
    auto add = [&](const Graph& g, const std::string& name) {
      for (const auto& l : lambdas) {
        SpinInstance inst;
        inst.descriptor = name + ",lambda=" + l;
        inst.graph_json = g.to_json();
        inst.lambda = parse_rational(l);
        config.spins.push_back(std::move(inst));
      }
    };
    if (entry.contains("graph")) {
      const auto& g = entry["graph"];
      if (g.is_string())
        add(Graph::named(g.get<std::string>()), g.get<std::string>());
      else
        add(Graph::from_json(g.dump()), "graph");
      continue;
    }
    std::string family = entry.at("family").get<std::string>();
    int n_min, n_max;
    if (entry.contains("n") && entry["n"].is_array()) {
      n_min = entry["n"][0].get<int>();
      n_max = entry["n"][1].get<int>();
    } else {
      n_min = n_max = entry.at("n").get<int>();
    }
    for (int n = n_min; n <= n_max; ++n) {
      if (family == "path")
        add(Graph::path(n), "path" + std::to_string(n));
      else if (family == "cycle")
        add(Graph::cycle(n), "cycle" + std::to_string(n));
      else if (family == "clique")
        add(Graph::clique(n), "clique" + std::to_string(n));
      else if (family == "empty")
        add(Graph::edgeless(n), "empty" + std::to_string(n));
      else if (family == "er") {
        double p = entry.value("p", 0.5);
        int count = entry.value("count", 1);
        for (int c = 0; c < count; ++c) {
          std::uint64_t state = config.seed + 0x9E3779B97F4A7C15ull * (++er_counter);
          std::uint64_t er_seed = splitmix64(state);
          add(Graph::erdos_renyi(n, p, er_seed),
              "er" + std::to_string(n) + "-p" + std::to_string(p) + "-s" +
                  std::to_string(c));
        }
      } else {
        throw InputError("unknown spin family: " + family);
      }
    }
  }
  for (const auto& entry : j.value("matroids", nlohmann::json::array())) {
    MatroidInstance inst;
    inst.spec = entry.is_string() ? entry.get<std::string>() : entry.dump();
    inst.descriptor = inst.spec;
    config.matroids.push_back(std::move(inst));
  }
  return config;
}

std::string SweepResult::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["total"] = total;
  j["passed"] = passed;
  j["failed_instances"] = failed_instances;
  j["failure_dumps"] = failure_dumps;
  auto arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(nlohmann::json::parse(r.to_json()));
  j["reports"] = arr;
  return j.dump(2);
}

SweepResult sweep(const SweepConfig& config, const Caps& caps) {
  SweepResult result;
  for (const auto& inst : config.spins) {
    auto graph = Graph::from_json(inst.graph_json);
    auto system = build_hardcore(graph, inst.lambda, caps);
    auto report = run_spin_suite(system, config.seed, caps, inst.descriptor);
    ++result.total;
    if (report.all_passed()) {
      ++result.passed;
    } else {
      result.failed_instances.push_back(inst.descriptor);
      nlohmann::json dump;
      dump["descriptor"] = inst.descriptor;
      dump["graph"] = nlohmann::json::parse(inst.graph_json);
      dump["lambda"] = format_rational(inst.lambda);
      dump["seed"] = config.seed;
      result.failure_dumps.push_back(dump.dump());
    }
    result.reports.push_back(std::move(report));
  }
  for (const auto& inst : config.matroids) {
    auto matroid = matroid_from_spec(inst.spec);
    auto report = run_matroid_suite(matroid, config.seed, caps, inst.descriptor);
    ++result.total;
    if (report.all_passed()) {
      ++result.passed;
    } else {
      result.failed_instances.push_back(inst.descriptor);
      nlohmann::json dump;
      dump["descriptor"] = inst.descriptor;
      dump["matroid"] = inst.spec;
      dump["seed"] = config.seed;
      result.failure_dumps.push_back(dump.dump());
    }
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace specmix
