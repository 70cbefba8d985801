#pragma once

#include <cstddef>
#include <string>

namespace ekfp::kern {

enum class Backend { scalar, avx2 };

// Backend in use. Resolved once: AVX2 when the CPU supports it, unless the
// EKFP_KERNELS environment variable ("scalar"/"avx2") or set_backend()
// overrides the choice.
Backend active_backend();
void set_backend(Backend b);
bool avx2_supported();
const char* backend_name(Backend b);

// Elementwise kernels are bit-identical across backends. dot/sum use
// lane-parallel accumulators under AVX2, so those results can differ from the
// scalar backend in the last ulps; max is exact on every backend.
void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void scale(const double* a, double s, double* out, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double max_value(const double* a, std::size_t n);

// C (m x n) = A (m x k) * B (k x n), all row-major. Accumulates into C when
// `accumulate` is set. The k-loop order is shared by both backends, so the
// result is bit-identical to the scalar reference.
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate = false);

namespace detail {

struct KernelTable {
  void (*add)(const double*, const double*, double*, std::size_t);
  void (*sub)(const double*, const double*, double*, std::size_t);
  void (*scale)(const double*, double, double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max_value)(const double*, std::size_t);
  void (*matmul)(const double*, const double*, double*, std::size_t,
                 std::size_t, std::size_t, bool);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in

}  // namespace detail

}  // namespace ekfp::kern
