#include "specmix/influence.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace specmix {

namespace {

// One pass over the conditional support: per free vertex the one-marginal,
// per ordered pair the joint one-one mass.
struct CondMoments {
  std::vector<int> free_vertices;
  std::vector<Rat> p1;                  // conditional Pr[sigma(v)=1]
  std::vector<std::vector<Rat>> joint;  // conditional Pr[sigma(i)=1, sigma(j)=1]
};

CondMoments conditional_moments(const SpinSystem& system, const Pinning& tau) {
  CondMoments m;
  auto split = free_frozen_split(system, tau);  // validates the pinning
  m.free_vertices = split.free_vertices;
  int f = static_cast<int>(m.free_vertices.size());
  m.p1.assign(f, 0);
  m.joint.assign(f, std::vector<Rat>(f, Rat(0)));
  Rat mass = 0;
  for (int c = 0; c < system.size(); ++c) {
    std::uint32_t cfg = system.support()[c];
    if (!tau.matches(cfg)) continue;
    mass += system.prob(c);
    for (int i = 0; i < f; ++i) {
      if (!((cfg >> m.free_vertices[i]) & 1)) continue;
      m.p1[i] += system.prob(c);
      for (int j = 0; j < f; ++j)
        if ((cfg >> m.free_vertices[j]) & 1) m.joint[i][j] += system.prob(c);
    }
  }
  for (int i = 0; i < f; ++i) {
    m.p1[i] /= mass;
    for (int j = 0; j < f; ++j) m.joint[i][j] /= mass;
  }
  return m;
}

}  // namespace

RatMatrix influence_matrix_exact(const SpinSystem& system, const Pinning& tau) {
  auto m = conditional_moments(system, tau);
  int f = static_cast<int>(m.free_vertices.size());
  RatMatrix psi(f, std::vector<Rat>(f, Rat(0)));
  for (int i = 0; i < f; ++i) {
    psi[i][i] = 1;
    for (int j = 0; j < f; ++j) {
      if (i == j) continue;
      // Pr[j=1 | i=1] - Pr[j=1 | i=0]
      psi[i][j] = m.joint[i][j] / m.p1[i] - (m.p1[j] - m.joint[i][j]) / (1 - m.p1[i]);
    }
  }
  return psi;
}

InfluenceMatrix influence_matrix(const SpinSystem& system, const Pinning& tau) {
  auto exact = influence_matrix_exact(system, tau);
  auto split = free_frozen_split(system, tau);
  InfluenceMatrix out;
  out.pinning = tau;
  out.free_vertices = split.free_vertices;
  int f = static_cast<int>(exact.size());
  out.degenerate = f == 0;
  out.entries = DenseMatrix(f, f);
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) out.entries.at(i, j) = i == j ? 1.0 : to_double(exact[i][j]);
  return out;
}

RatMatrix covariance_matrix_exact(const SpinSystem& system, const Pinning& tau) {
  auto m = conditional_moments(system, tau);
  int f = static_cast<int>(m.free_vertices.size());
  RatMatrix cov(f, std::vector<Rat>(f, Rat(0)));
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) cov[i][j] = m.joint[i][j] - m.p1[i] * m.p1[j];
  return cov;
}

DenseMatrix covariance_matrix(const SpinSystem& system, const Pinning& tau) {
  auto exact = covariance_matrix_exact(system, tau);
  int f = static_cast<int>(exact.size());
  DenseMatrix cov(f, f);
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) cov.at(i, j) = to_double(exact[i][j]);
  return cov;
}

std::vector<Rat> free_marginals_exact(const SpinSystem& system, const Pinning& tau) {
  auto m = conditional_moments(system, tau);
  return m.p1;
}

Spectrum influence_spectrum(const SpinSystem& system, const Pinning& tau) {
  auto m = conditional_moments(system, tau);
  int f = static_cast<int>(m.free_vertices.size());
  std::vector<double> dinv_sqrt(f);
  for (int i = 0; i < f; ++i) {
    Rat d = m.p1[i] * (1 - m.p1[i]);
    if (d <= 0)
      throw NumericsError("non-positive marginal product for a free vertex (free/frozen bug)");
    dinv_sqrt[i] = 1.0 / std::sqrt(to_double(d));
  }
  DenseMatrix sym(f, f);
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j)
      sym.at(i, j) = dinv_sqrt[i] * to_double(m.joint[i][j] - m.p1[i] * m.p1[j]) * dinv_sqrt[j];
  return sym_eigen(sym);
}

std::string SIReport::to_json() const {
  nlohmann::json j;
  j["eta"] = eta;
  j["b"] = b;
  j["witness_pinning"] = witness_pinning.to_string();
  j["per_level_max"] = per_level_max;
  return j.dump();
}

SIReport spectral_independence(const SpinSystem& system, const Caps& caps) {
  SIReport report;
  Rat min_marginal = 1;
  report.per_level_max.assign(system.n() + 1, 1.0);
  for (int k = 0; k <= system.n(); ++k) {
    for (const auto& tau : enumerate_pinnings(system, k, caps)) {
      auto split = free_frozen_split(system, tau);
      // track the marginal bound in the same sweep
      for (int v = 0; v < system.n(); ++v) {
        if (tau.pins(v)) continue;
        for (int s = 0; s < 2; ++s) {
          Rat p = cond_marginal_exact(system, tau, v, s);
          if (p > 0 && p < min_marginal) min_marginal = p;
        }
      }
      PinningEigenvalue entry;
      entry.pinning = tau;
      entry.free_count = static_cast<int>(split.free_vertices.size());
      if (entry.free_count >= 2) {
        auto spectrum = influence_spectrum(system, tau);
        entry.lambda_max = spectrum.eigenvalues.front();
        report.per_level_max[k] = std::max(report.per_level_max[k], entry.lambda_max);
        if (entry.lambda_max - 1.0 > report.eta) {
          report.eta = entry.lambda_max - 1.0;
          report.witness_pinning = tau;
        }
      } else {
        entry.lambda_max = 1.0;  // vacuous: empty or 1x1 influence matrix
      }
      report.per_pinning.push_back(std::move(entry));
    }
  }
  report.eta = std::max(report.eta, 0.0);
  report.b = to_double(min_marginal);
  return report;
}

}  // namespace specmix
