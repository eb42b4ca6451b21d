#include <atomic>
#include <cstdlib>
#include <string>

#include "panelspec/errors.hpp"
#include "panelspec/kernels.hpp"

namespace panelspec::kernels {

namespace {

Backend detect_default() noexcept {
  if (const char* env = std::getenv("PANELSPEC_KERNEL")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect_default()};
  return backend;
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(PANELSPEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw PanelError(ErrorKind::InvalidConfig, std::string("kernel backend '") + std::string(to_string(b)) +
                                                   "' is not supported on this CPU");
  }
  current().store(b, std::memory_order_relaxed);
}

void gaussian_kernel_sums(std::span<const double> points, std::span<const double> eval, double inv_h,
                          std::span<double> out) {
#if defined(PANELSPEC_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) {
    avx2::gaussian_kernel_sums(points, eval, inv_h, out);
    return;
  }
#endif
  scalar::gaussian_kernel_sums(points, eval, inv_h, out);
}

#if !defined(PANELSPEC_HAVE_AVX2)
namespace avx2 {
void gaussian_kernel_sums(std::span<const double> points, std::span<const double> eval, double inv_h,
                          std::span<double> out) {
  scalar::gaussian_kernel_sums(points, eval, inv_h, out);
}
}  // namespace avx2
#endif

}  // namespace panelspec::kernels
