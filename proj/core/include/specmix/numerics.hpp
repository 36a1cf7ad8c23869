#pragma once

#include <string>
#include <vector>

#include "specmix/errors.hpp"

namespace specmix {

/// Dense row-major real matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  static DenseMatrix identity(int n);
  DenseMatrix transposed() const;
  double trace() const;

  std::string to_csv() const;

  /// Max |A - A^T| entry.
  double symmetry_residual() const;

  bool finite() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> multiply(const DenseMatrix& a, const std::vector<double>& x);
/// x^T A as a row vector.
std::vector<double> multiply(const std::vector<double>& x, const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

struct Spectrum {
  std::vector<double> eigenvalues;  // sorted descending
  double max_imag_residual = 0.0;   // symmetrization residual of the input
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // sorted descending
  DenseMatrix eigenvectors;         // columns, matching eigenvalue order
};

/// Cyclic Jacobi iteration; off-diagonal Frobenius threshold 1e-13 relative
/// to the input scale, sweep cap 100.  Input must be symmetric to 1e-9.
Spectrum sym_eigen(const DenseMatrix& matrix);
EigenDecomposition sym_eigen_full(const DenseMatrix& matrix);

/// Spectrum of a row-stochastic kernel reversible w.r.t. pi, via the
/// similarity transform D^{1/2} P D^{-1/2}.
Spectrum reversible_spectrum(const DenseMatrix& kernel, const std::vector<double>& pi);
EigenDecomposition reversible_eigen(const DenseMatrix& kernel, const std::vector<double>& pi);

/// Max detailed-balance residual |pi_i P_ij - pi_j P_ji|.
double detailed_balance_residual(const DenseMatrix& kernel, const std::vector<double>& pi);

struct GapReport {
  double gamma = 0.0;          // 1 - lambda_2
  double absolute_gap = 0.0;   // 1 - lambda_*
  double lambda_star = 0.0;    // max(lambda_2, |lambda_N|)
  bool reducible = false;      // second eigenvalue at 1 within snap tolerance
};

/// For a single-state spectrum the gap is 1 by convention.
GapReport gap(const Spectrum& spectrum);

/// Dominant-eigenvalue oracle, independent of the Jacobi path.  Plain power
/// iteration on A (suitable for matrices similar to PSD ones).
double power_iteration_max_eigenvalue(const DenseMatrix& a, int max_iters = 20000,
                                      double tol = 1e-13);

/// Sorted multiset comparison; returns max per-element deviation, or +inf on
/// a size mismatch.
double multiset_deviation(std::vector<double> a, std::vector<double> b);

}  // namespace specmix
