#include "falsar/kernels.hpp"

#include <cmath>

namespace falsar::kernels {

namespace ref {

// Comparisons are written (a OP b) ? a : b to match the vminpd/vmaxpd
// operand-selection semantics exactly.
static void k_neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}
static void k_abs(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i]);
}
static void k_add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
static void k_sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
static void k_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
static void k_min(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] < b[i]) ? a[i] : b[i];
}
static void k_max(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] > b[i]) ? a[i] : b[i];
}
static void k_add_s(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + c;
}
static void k_sub_s(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - c;
}
static void k_rsub_s(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c - a[i];
}
static void k_mul_s(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * c;
}
static void k_div_s(const double* a, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / c;
}

const Ops ops = {k_neg, k_abs,   k_add,   k_sub,    k_mul,   k_min,
                 k_max, k_add_s, k_sub_s, k_rsub_s, k_mul_s, k_div_s};

}  // namespace ref

#if !defined(FALSAR_HAVE_AVX2_TU)
namespace avx2 {
const Ops ops = ref::ops;
bool compiled_in() { return false; }
}  // namespace avx2
#endif

static bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops& active() {
  static const Ops* chosen =
      (avx2::compiled_in() && cpu_has_avx2()) ? &avx2::ops : &ref::ops;
  return *chosen;
}

const char* active_name() {
  return (&active() == &ref::ops) ? "scalar" : "avx2";
}

}  // namespace falsar::kernels
