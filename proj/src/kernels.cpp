#include "ekfp/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ekfp/errors.hpp"

namespace ekfp::kern {

namespace {

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void scale_scalar(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_scalar(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

// (i, k, j) loop order; the AVX2 variant vectorizes the j loop and keeps the
// same k recurrence, which is what makes the two backends bit-identical.
void matmul_scalar(const double* a, const double* b, double* c, std::size_t m,
                   std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (!accumulate) std::memset(crow, 0, n * sizeof(double));
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + aip * brow[j];
    }
  }
}

struct State {
  Backend backend;
  const detail::KernelTable* table;
};

State resolve_initial() {
  const detail::KernelTable* avx2 = detail::avx2_table();
  Backend b = avx2 ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("EKFP_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) b = Backend::scalar;
    else if (std::strcmp(env, "avx2") == 0 && avx2) b = Backend::avx2;
  }
  return {b, b == Backend::avx2 ? avx2 : &detail::scalar_table()};
}

State& state() {
  static State s = resolve_initial();
  return s;
}

}  // namespace

namespace detail {

const KernelTable& scalar_table() {
  static const KernelTable t = {add_scalar, sub_scalar,  scale_scalar,
                                axpy_scalar, dot_scalar, sum_scalar,
                                max_scalar,  matmul_scalar};
  return t;
}

}  // namespace detail

Backend active_backend() { return state().backend; }

bool avx2_supported() { return detail::avx2_table() != nullptr; }

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void set_backend(Backend b) {
  if (b == Backend::avx2) {
    const detail::KernelTable* t = detail::avx2_table();
    if (!t) throw ConfigError("kernels: avx2 backend not available on this host");
    state() = {Backend::avx2, t};
  } else {
    state() = {Backend::scalar, &detail::scalar_table()};
  }
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  state().table->add(a, b, out, n);
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  state().table->sub(a, b, out, n);
}
void scale(const double* a, double s, double* out, std::size_t n) {
  state().table->scale(a, s, out, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  state().table->axpy(alpha, x, y, n);
}
double dot(const double* a, const double* b, std::size_t n) {
  return state().table->dot(a, b, n);
}
double sum(const double* a, std::size_t n) { return state().table->sum(a, n); }
double max_value(const double* a, std::size_t n) {
  return state().table->max_value(a, n);
}
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate) {
  state().table->matmul(a, b, c, m, k, n, accumulate);
}

}  // namespace ekfp::kern
