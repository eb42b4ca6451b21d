#include <cmath>
#include <cstddef>

#include "panelspec/kernels.hpp"

namespace panelspec::kernels::scalar {

void gaussian_kernel_sums(std::span<const double> points, std::span<const double> eval, double inv_h,
                          std::span<double> out) {
  for (std::size_t j = 0; j < eval.size(); ++j) {
    const double e = eval[j];
    double acc = 0.0;
    for (const double p : points) {
      const double z = (e - p) * inv_h;
      acc += std::exp(-0.5 * z * z);
    }
    out[j] = acc;
  }
}

}  // namespace panelspec::kernels::scalar
