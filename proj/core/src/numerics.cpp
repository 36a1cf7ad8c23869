#include "specmix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace specmix {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

double DenseMatrix::trace() const {
  double acc = 0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) acc += at(i, i);
  return acc;
}

std::string DenseMatrix::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (j) out << ",";
      out << at(i, j);
    }
    out << "\n";
  }
  return out.str();
}

double DenseMatrix::symmetry_residual() const {
  double r = 0;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) r = std::max(r, std::fabs(at(i, j) - at(j, i)));
  return r;
}

bool DenseMatrix::finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw NumericsError("matrix dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

std::vector<double> multiply(const DenseMatrix& a, const std::vector<double>& x) {
  if (a.cols() != static_cast<int>(x.size())) throw NumericsError("matrix/vector dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double acc = 0;
    for (int j = 0; j < a.cols(); ++j) acc += a.at(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> multiply(const std::vector<double>& x, const DenseMatrix& a) {
  if (a.rows() != static_cast<int>(x.size())) throw NumericsError("vector/matrix dimension mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    for (int j = 0; j < a.cols(); ++j) y[j] += xi * a.at(i, j);
  }
  return y;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  double r = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    r = std::max(r, std::fabs(a.data()[i] - b.data()[i]));
  return r;
}

namespace {

// Cyclic Jacobi on the symmetrized input.  Rotations are accumulated into V
// when it is non-null.
std::vector<double> jacobi(DenseMatrix a, DenseMatrix* v) {
  int n = a.rows();
  if (v) *v = DenseMatrix::identity(n);
  if (n == 0) return {};

  double scale = 0;
  for (double x : a.data()) scale += x * x;
  scale = std::sqrt(scale);
  double threshold = 1e-13 * std::max(1.0, scale);

  auto off_norm = [&]() {
    double acc = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) acc += 2 * a.at(p, q) * a.at(p, q);
    return std::sqrt(acc);
  };

  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= threshold) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a.at(p, q);
        if (std::fabs(apq) <= threshold / (n * 8.0)) continue;
        double app = a.at(p, p), aqq = a.at(q, q);
        double theta = (aqq - app) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1);
        double s = t * c;
        double tau = s / (1 + c);

        a.at(p, p) = app - t * apq;
        a.at(q, q) = aqq + t * apq;
        a.at(p, q) = a.at(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            double arp = a.at(r, p), arq = a.at(r, q);
            a.at(r, p) = a.at(p, r) = arp - s * (arq + tau * arp);
            a.at(r, q) = a.at(q, r) = arq + s * (arp - tau * arq);
          }
          if (v) {
            double vrp = v->at(r, p), vrq = v->at(r, q);
            v->at(r, p) = vrp - s * (vrq + tau * vrp);
            v->at(r, q) = vrq + s * (vrp - tau * vrq);
          }
        }
      }
    }
  }
  if (sweep == max_sweeps && off_norm() > threshold)
    throw NumericsError("Jacobi iteration did not converge in 100 sweeps");

  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = a.at(i, i);
  return values;
}

void sort_descending(std::vector<double>& values, DenseMatrix* vectors) {
  int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  std::vector<double> sorted(n);
  for (int i = 0; i < n; ++i) sorted[i] = values[order[i]];
  values = std::move(sorted);
  if (vectors) {
    DenseMatrix rearranged(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) rearranged.at(i, j) = vectors->at(i, order[j]);
    *vectors = std::move(rearranged);
  }
}

DenseMatrix symmetrize_checked(const DenseMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) throw NumericsError("eigendecomposition needs a square matrix");
  if (!matrix.finite()) throw NumericsError("matrix has non-finite entries");
  double residual = matrix.symmetry_residual();
  if (residual >= 1e-9)
    throw NumericsError("matrix not symmetric: residual " + std::to_string(residual));
  DenseMatrix sym(matrix.rows(), matrix.cols());
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j) sym.at(i, j) = 0.5 * (matrix.at(i, j) + matrix.at(j, i));
  return sym;
}

}  // namespace

Spectrum sym_eigen(const DenseMatrix& matrix) {
  Spectrum out;
  out.max_imag_residual = matrix.symmetry_residual();
  out.eigenvalues = jacobi(symmetrize_checked(matrix), nullptr);
  sort_descending(out.eigenvalues, nullptr);
  return out;
}

EigenDecomposition sym_eigen_full(const DenseMatrix& matrix) {
  EigenDecomposition out;
  out.eigenvalues = jacobi(symmetrize_checked(matrix), &out.eigenvectors);
  sort_descending(out.eigenvalues, &out.eigenvectors);
  return out;
}

double detailed_balance_residual(const DenseMatrix& kernel, const std::vector<double>& pi) {
  double r = 0;
  for (int i = 0; i < kernel.rows(); ++i)
    for (int j = i + 1; j < kernel.cols(); ++j)
      r = std::max(r, std::fabs(pi[i] * kernel.at(i, j) - pi[j] * kernel.at(j, i)));
  return r;
}

namespace {

DenseMatrix similarity_transform(const DenseMatrix& kernel, const std::vector<double>& pi) {
  int n = kernel.rows();
  if (n != kernel.cols() || n != static_cast<int>(pi.size()))
    throw NumericsError("kernel/stationary dimension mismatch");
  for (double p : pi)
    if (!(p > 0)) throw NumericsError("zero stationary mass on a state");
  double residual = detailed_balance_residual(kernel, pi);
  if (residual > 1e-10)
    throw NumericsError("detailed balance violated: residual " + std::to_string(residual));
  std::vector<double> sqrt_pi(n);
  for (int i = 0; i < n; ++i) sqrt_pi[i] = std::sqrt(pi[i]);
  DenseMatrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.at(i, j) = sqrt_pi[i] * kernel.at(i, j) / sqrt_pi[j];
  return s;
}

}  // namespace

Spectrum reversible_spectrum(const DenseMatrix& kernel, const std::vector<double>& pi) {
  Spectrum out = sym_eigen(similarity_transform(kernel, pi));
  if (!out.eigenvalues.empty() && std::fabs(out.eigenvalues.front() - 1.0) > 1e-10)
    throw NumericsError("top eigenvalue of a stochastic kernel deviates from 1 by " +
                        std::to_string(out.eigenvalues.front() - 1.0));
  return out;
}

EigenDecomposition reversible_eigen(const DenseMatrix& kernel, const std::vector<double>& pi) {
  return sym_eigen_full(similarity_transform(kernel, pi));
}

GapReport gap(const Spectrum& spectrum) {
  GapReport report;
  const auto& ev = spectrum.eigenvalues;
  if (ev.empty()) throw NumericsError("empty spectrum");
  if (ev.size() == 1) {
    report.gamma = 1.0;
    report.absolute_gap = 1.0;
    report.lambda_star = 0.0;
    return report;
  }
  double lambda2 = ev[1];
  double lambdaN = ev.back();
  report.gamma = 1.0 - lambda2;
  report.lambda_star = std::max(lambda2, std::fabs(lambdaN));
  report.absolute_gap = 1.0 - report.lambda_star;
  // snap for classification only; reported values stay raw
  report.reducible = lambda2 >= 1.0 - 1e-8;
  return report;
}

double power_iteration_max_eigenvalue(const DenseMatrix& a, int max_iters, double tol) {
  int n = a.rows();
  if (n == 0) throw NumericsError("empty matrix");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 1.0 / (i + 2.0);  // fixed deterministic start
  double lambda = 0;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> y = multiply(a, x);
    double norm = 0;
    for (double v : y) norm = std::max(norm, std::fabs(v));
    if (norm == 0) return 0.0;
    for (double& v : y) v /= norm;
    double num = 0, den = 0;
    std::vector<double> ay = multiply(a, y);
    for (int i = 0; i < n; ++i) {
      num += y[i] * ay[i];
      den += y[i] * y[i];
    }
    double next = num / den;
    if (it > 3 && std::fabs(next - lambda) < tol) return next;
    lambda = next;
    x = std::move(y);
  }
  return lambda;
}

double multiset_deviation(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double r = 0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::fabs(a[i] - b[i]));
  return r;
}

}  // namespace specmix
