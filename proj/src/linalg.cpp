#include "ekfp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ekfp/errors.hpp"
#include "ekfp/kernels.hpp"

namespace ekfp {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

void Matrix::symmetrize() {
  for (int r = 0; r < rows_; ++r) {
    for (int c = r + 1; c < cols_; ++c) {
      const double v = 0.5 * ((*this)(r, c) + (*this)(c, r));
      (*this)(r, c) = v;
      (*this)(c, r) = v;
    }
  }
}

bool Matrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r)
    for (int c = r + 1; c < cols_; ++c)
      if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
  return true;
}

void Matrix::add_scaled_identity(double s) {
  for (int i = 0; i < rows_; ++i) (*this)(i, i) += s;
}

Matrix Matrix::operator+(const Matrix& o) const {
  Matrix r(rows_, cols_);
  kern::add(data(), o.data(), r.data(), d_.size());
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  Matrix r(rows_, cols_);
  kern::sub(data(), o.data(), r.data(), d_.size());
  return r;
}

Matrix Matrix::operator*(double s) const {
  Matrix r(rows_, cols_);
  kern::scale(data(), s, r.data(), d_.size());
  return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ConfigError("matmul: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  kern::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols(),
               false);
  return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw ConfigError("matvec: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  kern::matmul(a.data(), x.data(), y.data(), a.rows(), a.cols(), 1, false);
  return y;
}

bool cholesky(const Matrix& a, Matrix& lower) {
  const int n = a.rows();
  lower = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j) - kern::dot(lower.data() + j * n, lower.data() + j * n, j);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      const double s =
          kern::dot(lower.data() + i * n, lower.data() + j * n, j);
      lower(i, j) = (a(i, j) - s) / ljj;
    }
  }
  return true;
}

namespace {

Matrix cholesky_solve(const Matrix& lower, const Matrix& b) {
  const int n = lower.rows();
  const int m = b.cols();
  Matrix x = b;
  // forward: L y = b
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < n; ++i) {
      double acc = x(i, c);
      for (int k = 0; k < i; ++k) acc -= lower(i, k) * x(k, c);
      x(i, c) = acc / lower(i, i);
    }
  }
  // backward: L^T x = y
  for (int c = 0; c < m; ++c) {
    for (int i = n - 1; i >= 0; --i) {
      double acc = x(i, c);
      for (int k = i + 1; k < n; ++k) acc -= lower(k, i) * x(k, c);
      x(i, c) = acc / lower(i, i);
    }
  }
  return x;
}

}  // namespace

Matrix lu_solve(const Matrix& a, const Matrix& b) {
  const int n = a.rows();
  if (a.cols() != n || b.rows() != n)
    throw ConfigError("lu_solve: dimension mismatch");
  Matrix lu = a;
  Matrix x = b;
  std::vector<int> perm(n);
  double max_pivot = 0.0, min_pivot = 0.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(lu(col, col));
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(lu(r, col)) > best) {
        best = std::abs(lu(r, col));
        piv = r;
      }
    }
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(lu(col, c), lu(piv, c));
      for (int c = 0; c < x.cols(); ++c) std::swap(x(col, c), x(piv, c));
    }
    perm[col] = piv;
    const double p = lu(col, col);
    max_pivot = std::max(max_pivot, std::abs(p));
    min_pivot = col == 0 ? std::abs(p) : std::min(min_pivot, std::abs(p));
    if (std::abs(p) < 1e-300 || std::abs(p) < 1e-14 * max_pivot) {
      std::ostringstream msg;
      msg << "lu_solve: matrix numerically singular, reciprocal condition ~ "
          << (max_pivot > 0 ? std::abs(p) / max_pivot : 0.0);
      throw NumericError(msg.str());
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / p;
      lu(r, col) = f;
      for (int c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
      for (int c = 0; c < x.cols(); ++c) x(r, c) -= f * x(col, c);
    }
  }
  for (int c = 0; c < x.cols(); ++c) {
    for (int i = n - 1; i >= 0; --i) {
      double acc = x(i, c);
      for (int k = i + 1; k < n; ++k) acc -= lu(i, k) * x(k, c);
      x(i, c) = acc / lu(i, i);
    }
  }
  return x;
}

Matrix solve_spd(const Matrix& s, const Matrix& b) {
  Matrix lower;
  if (cholesky(s, lower)) return cholesky_solve(lower, b);
  return lu_solve(s, b);
}

EigenDecomposition symmetric_eigen(const Matrix& a) {
  const int n = a.rows();
  if (a.cols() != n) throw ConfigError("symmetric_eigen: matrix not square");
  Matrix m = a;
  Matrix v = Matrix::identity(n);
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - sn * mkq;
          m(k, q) = sn * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - sn * mqk;
          m(q, k) = sn * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  EigenDecomposition dec;
  dec.values.resize(n);
  for (int i = 0; i < n; ++i) dec.values[i] = m(i, i);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return dec.values[x] < dec.values[y]; });
  EigenDecomposition sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    sorted.values[i] = dec.values[order[i]];
    for (int r = 0; r < n; ++r) sorted.vectors(r, i) = v(r, order[i]);
  }
  return sorted;
}

double min_symmetric_eigenvalue(const Matrix& a) {
  return symmetric_eigen(a).values.front();
}

}  // namespace ekfp
