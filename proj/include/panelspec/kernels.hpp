#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops of the weighted-likelihood engine.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, a vector variant. The active variant is chosen once at runtime
// from CPU capabilities and can be overridden with PANELSPEC_KERNEL=scalar or
// set_backend(). Variants are required to agree with the scalar reference to
// within floating-point rounding; see tests/test_kernels.cpp.
namespace panelspec::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b) noexcept;

bool backend_supported(Backend b) noexcept;

Backend active_backend() noexcept;

// Throws PanelError(InvalidConfig) if the backend is not supported on this CPU.
void set_backend(Backend b);

// out[j] = sum_i exp(-0.5 * ((eval[j] - points[i]) * inv_h)^2)
//
// For every j the sum runs over i in increasing order in all variants, so the
// only difference between them is the accuracy of exp().
void gaussian_kernel_sums(std::span<const double> points, std::span<const double> eval, double inv_h,
                          std::span<double> out);

namespace scalar {
void gaussian_kernel_sums(std::span<const double> points, std::span<const double> eval, double inv_h,
                          std::span<double> out);
}

namespace avx2 {
void gaussian_kernel_sums(std::span<const double> points, std::span<const double> eval, double inv_h,
                          std::span<double> out);
}

}  // namespace panelspec::kernels
