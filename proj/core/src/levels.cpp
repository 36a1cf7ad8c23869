#include "specmix/levels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace specmix {

Face pinning_to_face(const Pinning& tau) {
  Face face;
  face.reserve(tau.assignments().size());
  for (auto [v, s] : tau.assignments()) face.push_back(pair_id(v, s));
  return face;  // sorted because assignments are sorted by vertex
}

Pinning face_to_pinning(const Face& face) {
  std::vector<std::pair<int, int>> assignment;
  assignment.reserve(face.size());
  for (int id : face) assignment.emplace_back(id / 2, id % 2);
  return Pinning(std::move(assignment));
}

std::string WalkKernel::state_index_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["row_states"] = row_labels;
  j["col_states"] = col_labels;
  if (!stationary.empty()) j["stationary"] = stationary;
  j["reversible"] = reversible;
  return j.dump();
}

Spectrum reversible_spectrum(const WalkKernel& kernel) {
  if (!kernel.square() || kernel.stationary.empty())
    throw NumericsError("reversible spectrum needs a square kernel with a stationary distribution");
  return reversible_spectrum(kernel.entries, kernel.stationary);
}

EigenDecomposition reversible_eigen(const WalkKernel& kernel) {
  return reversible_eigen(kernel.entries, kernel.stationary);
}

namespace {

std::string pinning_label(const Pinning& tau) {
  std::string s = tau.to_string();
  return s.empty() ? "()" : s;
}

std::vector<std::string> level_labels(const FaceComplex& complex, int k) {
  std::vector<std::string> labels;
  labels.reserve(complex.level(k).faces.size());
  for (const auto& face : complex.level(k).faces)
    labels.push_back(pinning_label(face_to_pinning(face)));
  return labels;
}

}  // namespace

Levels::Levels(const SpinSystem& system, const Caps& caps)
    : system_(std::make_shared<SpinSystem>(system)) {
  std::vector<Face> tops;
  std::vector<Rat> weights;
  tops.reserve(system.size());
  for (int i = 0; i < system.size(); ++i) {
    Face face;
    face.reserve(system.n());
    for (int v = 0; v < system.n(); ++v) face.push_back(pair_id(v, system.config(i).spin(v)));
    tops.push_back(std::move(face));
    weights.push_back(system.prob(i));
  }
  complex_ = std::make_shared<FaceComplex>(2 * system.n(), std::move(tops), std::move(weights), caps);
}

LevelSpace Levels::level_space(int k) const {
  const auto& level = complex_->level(k);
  LevelSpace space;
  space.k = k;
  space.elements.reserve(level.size());
  for (const auto& face : level.faces) space.elements.push_back(face_to_pinning(face));
  space.pi = level.pi_d;
  space.pi_exact = level.pi;
  return space;
}

std::vector<double> Levels::stationary_of_level(int k) const { return complex_->level(k).pi_d; }

WalkKernel Levels::wrap_square(int k, DenseMatrix m) const {
  WalkKernel kernel;
  kernel.entries = std::move(m);
  kernel.row_labels = level_labels(*complex_, k);
  kernel.col_labels = kernel.row_labels;
  kernel.stationary = stationary_of_level(k);
  kernel.reversible = detailed_balance_residual(kernel.entries, kernel.stationary) <= 1e-12;
  return kernel;
}

WalkKernel Levels::down_operator(int k) const {
  WalkKernel kernel;
  kernel.entries = complex_->down_kernel(k);
  kernel.row_labels = level_labels(*complex_, k);
  kernel.col_labels = level_labels(*complex_, k - 1);
  return kernel;
}

WalkKernel Levels::up_operator(int k) const {
  WalkKernel kernel;
  kernel.entries = complex_->up_kernel(k);
  kernel.row_labels = level_labels(*complex_, k);
  kernel.col_labels = level_labels(*complex_, k + 1);
  return kernel;
}

WalkKernel Levels::up_down(int k) const { return wrap_square(k, complex_->up_down(k)); }

WalkKernel Levels::down_up(int k) const { return wrap_square(k, complex_->down_up(k)); }

WalkKernel Levels::down_up_multi(int i, int j) const {
  return wrap_square(i, complex_->down_up_multi(i, j));
}

LocalWalk Levels::local_walk(const Pinning& tau) const {
  if (tau.level() > n() - 2)
    throw DegenerateWalkError("local walk needs at least 2 unpinned vertices");
  if (!system_->is_valid_pinning(tau))
    throw InvalidPinningError("pinning {" + tau.to_string() + "} is invalid");
  auto engine_walk = complex_->local_walk(pinning_to_face(tau));
  LocalWalk walk;
  walk.pinning = tau;
  walk.states.reserve(engine_walk.states.size());
  for (int id : engine_walk.states) walk.states.emplace_back(id / 2, id % 2);
  walk.kernel.entries = std::move(engine_walk.kernel);
  walk.kernel.stationary = std::move(engine_walk.stationary);
  for (auto [v, s] : walk.states)
    walk.kernel.row_labels.push_back(std::to_string(v) + ":" + std::to_string(s));
  walk.kernel.col_labels = walk.kernel.row_labels;
  walk.kernel.reversible = true;
  return walk;
}

std::vector<LevelGap> Levels::local_gaps() const {
  std::vector<LevelGap> gaps;
  for (int k = 0; k <= n() - 2; ++k) {
    LevelGap level_gap;
    level_gap.k = k;
    level_gap.gamma = 2.0;  // any spectral gap is at most 2
    bool first = true;
    for (const auto& face : complex_->level(k).faces) {
      auto walk = complex_->local_walk(face);
      auto report = gap(reversible_spectrum(walk.kernel, walk.stationary));
      double gamma = report.reducible ? 0.0 : report.gamma;
      if (first || gamma < level_gap.gamma) {
        first = false;
        level_gap.gamma = gamma;
        level_gap.witness = face_to_pinning(face);
        level_gap.reducible = report.reducible;
      }
    }
    gaps.push_back(std::move(level_gap));
  }
  return gaps;
}

std::vector<double> Levels::project(int k, const std::vector<double>& f_upper) const {
  return complex_->project(k, f_upper);
}

int Levels::pinning_index(int k, const Pinning& tau) const {
  return complex_->level(k).find(pinning_to_face(tau));
}

double expectation(const std::vector<double>& dist, const std::vector<double>& f) {
  if (dist.size() != f.size()) throw NumericsError("distribution/function dimension mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) acc += dist[i] * f[i];
  return acc;
}

double variance(const std::vector<double>& dist, const std::vector<double>& f) {
  double mean = expectation(dist, f);
  double centered = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double d = f[i] - mean;
    centered += dist[i] * d * d;
  }
  double pairwise = 0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    for (std::size_t j = 0; j < dist.size(); ++j) {
      double d = f[i] - f[j];
      pairwise += dist[i] * dist[j] * d * d;
    }
  pairwise *= 0.5;
  double scale = std::max(1.0, std::fabs(centered));
  if (std::fabs(centered - pairwise) > 1e-12 * scale)
    throw NumericsError("variance forms disagree beyond 1e-12");
  return centered;
}

double dirichlet(const DenseMatrix& kernel, const std::vector<double>& stationary,
                 const std::vector<double>& f) {
  if (kernel.rows() != static_cast<int>(f.size()) ||
      kernel.rows() != static_cast<int>(stationary.size()))
    throw NumericsError("dirichlet form dimension mismatch");
  double acc = 0;
  for (int i = 0; i < kernel.rows(); ++i)
    for (int j = 0; j < kernel.cols(); ++j) {
      double p = kernel.at(i, j);
      if (p == 0.0) continue;
      double d = f[i] - f[j];
      acc += stationary[i] * p * d * d;
    }
  return 0.5 * acc;
}

double dirichlet(const WalkKernel& kernel, const std::vector<double>& f) {
  if (!kernel.square() || kernel.stationary.empty())
    throw NumericsError("dirichlet form needs a square kernel with stationary distribution");
  return dirichlet(kernel.entries, kernel.stationary, f);
}

}  // namespace specmix
