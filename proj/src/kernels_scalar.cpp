#include <cmath>

#include "ads3/kernels.hpp"

namespace ads3::kernels::scalar {

void inner_batch(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                 std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = ((a.x1 * b1[j] + a.x2 * b2[j]) - a.x3 * b3[j]) - a.x4 * b4[j];
}

ArgMin min_abs_inner(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                     std::size_t n) {
  ArgMin best{INFINITY, 0};
  for (std::size_t j = 0; j < n; ++j) {
    const double v = std::fabs(((a.x1 * b1[j] + a.x2 * b2[j]) - a.x3 * b3[j]) - a.x4 * b4[j]);
    if (v < best.value) best = {v, static_cast<std::uint32_t>(j)};
  }
  return best;
}

}  // namespace ads3::kernels::scalar
