#pragma once

#include <span>
#include <vector>

namespace ekfp {

// Dense row-major matrix sized for the belief dimensions used here
// (a handful of actions up to a few dozen).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), d_(rows * cols, 0.0) {}

  static Matrix identity(int n);

  double& operator()(int r, int c) { return d_[r * cols_ + c]; }
  double operator()(int r, int c) const { return d_[r * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }

  Matrix transposed() const;
  void symmetrize();  // A <- (A + A^T) / 2
  bool is_symmetric(double tol) const;
  void add_scaled_identity(double s);  // A <- A + s I

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(double s) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Returns false when the matrix is not numerically positive definite.
bool cholesky(const Matrix& a, Matrix& lower);

// X = S^-1 B for symmetric S: Cholesky first, LU with partial pivoting as the
// fallback for indefinite inputs. Throws NumericError carrying a reciprocal
// condition estimate when S is numerically singular.
Matrix solve_spd(const Matrix& s, const Matrix& b);

// X = A^-1 B by LU with partial pivoting. Throws NumericError when singular.
Matrix lu_solve(const Matrix& a, const Matrix& b);

// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix
// by cyclic Jacobi rotations.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};
EigenDecomposition symmetric_eigen(const Matrix& a);

double min_symmetric_eigenvalue(const Matrix& a);

}  // namespace ekfp
