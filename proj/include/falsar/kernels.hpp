#pragma once

#include <cstddef>

// Element-wise double kernels used by the robustness evaluator and the
// model output transforms. Every op has a scalar reference implementation
// and (on x86-64) an AVX2 variant; the active set is chosen once at load
// time from CPUID. All ops are single IEEE operations per element, so the
// two variants produce bit-identical results and either may be used.

namespace falsar::kernels {

struct Ops {
  void (*neg)(const double* a, double* out, std::size_t n);
  void (*abs)(const double* a, double* out, std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*min)(const double* a, const double* b, double* out, std::size_t n);
  void (*max)(const double* a, const double* b, double* out, std::size_t n);
  void (*add_s)(const double* a, double c, double* out, std::size_t n);
  void (*sub_s)(const double* a, double c, double* out, std::size_t n);   // a - c
  void (*rsub_s)(const double* a, double c, double* out, std::size_t n);  // c - a
  void (*mul_s)(const double* a, double c, double* out, std::size_t n);
  void (*div_s)(const double* a, double c, double* out, std::size_t n);   // a / c
};

namespace ref {
extern const Ops ops;
}
namespace avx2 {
// Present only when the build has the AVX2 TU; callable only on CPUs
// reporting AVX2 support.
extern const Ops ops;
bool compiled_in();
}

// Dispatched op table (ref or avx2, picked at startup).
const Ops& active();
const char* active_name();

}  // namespace falsar::kernels
