// AVX2 variants of the element-wise kernels. This TU is the only one
// compiled with -mavx2; callers must check CPU support before using it.

#include "falsar/kernels.hpp"

#include <immintrin.h>

namespace falsar::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

// |x| = clear the sign bit; matches std::fabs for all inputs incl. -0, inf.
inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

inline __m256d neg_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000LL));
  return _mm256_xor_pd(v, mask);
}

template <class VecOp, class TailOp>
inline void unary_loop(const double* a, double* out, std::size_t n, VecOp vop,
                       TailOp top) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, vop(_mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) out[i] = top(a[i]);
}

template <class VecOp, class TailOp>
inline void binary_loop(const double* a, const double* b, double* out,
                        std::size_t n, VecOp vop, TailOp top) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i,
                     vop(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = top(a[i], b[i]);
}

template <class VecOp, class TailOp>
inline void scalar_loop(const double* a, double c, double* out, std::size_t n,
                        VecOp vop, TailOp top) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, vop(_mm256_loadu_pd(a + i), vc));
  }
  for (; i < n; ++i) out[i] = top(a[i], c);
}

void k_neg(const double* a, double* out, std::size_t n) {
  unary_loop(a, out, n, neg_pd, [](double x) { return -x; });
}
void k_abs(const double* a, double* out, std::size_t n) {
  unary_loop(a, out, n, abs_pd,
             [](double x) { return __builtin_fabs(x); });
}
void k_add(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n,
              [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
              [](double x, double y) { return x + y; });
}
void k_sub(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n,
              [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
              [](double x, double y) { return x - y; });
}
void k_mul(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n,
              [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
              [](double x, double y) { return x * y; });
}
void k_min(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n,
              [](__m256d x, __m256d y) { return _mm256_min_pd(x, y); },
              [](double x, double y) { return (x < y) ? x : y; });
}
void k_max(const double* a, const double* b, double* out, std::size_t n) {
  binary_loop(a, b, out, n,
              [](__m256d x, __m256d y) { return _mm256_max_pd(x, y); },
              [](double x, double y) { return (x > y) ? x : y; });
}
void k_add_s(const double* a, double c, double* out, std::size_t n) {
  scalar_loop(a, c, out, n,
              [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
              [](double x, double y) { return x + y; });
}
void k_sub_s(const double* a, double c, double* out, std::size_t n) {
  scalar_loop(a, c, out, n,
              [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
              [](double x, double y) { return x - y; });
}
void k_rsub_s(const double* a, double c, double* out, std::size_t n) {
  scalar_loop(a, c, out, n,
              [](__m256d x, __m256d y) { return _mm256_sub_pd(y, x); },
              [](double x, double y) { return y - x; });
}
void k_mul_s(const double* a, double c, double* out, std::size_t n) {
  scalar_loop(a, c, out, n,
              [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
              [](double x, double y) { return x * y; });
}
void k_div_s(const double* a, double c, double* out, std::size_t n) {
  scalar_loop(a, c, out, n,
              [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); },
              [](double x, double y) { return x / y; });
}

}  // namespace

const Ops ops = {k_neg, k_abs,   k_add,   k_sub,    k_mul,   k_min,
                 k_max, k_add_s, k_sub_s, k_rsub_s, k_mul_s, k_div_s};

bool compiled_in() { return true; }

}  // namespace falsar::kernels::avx2
