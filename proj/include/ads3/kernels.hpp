#pragma once

// Data-parallel loops over batches of Lorentz vectors. Each kernel has a scalar
// reference and an AVX2 variant; the variant is picked once at runtime from the
// CPU feature bits. Both variants evaluate the form in the same operation order
// without fused multiply-add, so their results are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ads3/lorentz.hpp"

namespace ads3::kernels {

// Structure-of-arrays batch of 4-vectors.
struct SoA4 {
  std::vector<double> x1, x2, x3, x4;

  std::size_t size() const { return x1.size(); }
  void reserve(std::size_t n) { x1.reserve(n); x2.reserve(n); x3.reserve(n); x4.reserve(n); }
  void push_back(const LorentzVec& v) { x1.push_back(v.x1); x2.push_back(v.x2); x3.push_back(v.x3); x4.push_back(v.x4); }
  LorentzVec at(std::size_t i) const { return {x1[i], x2[i], x3[i], x4[i]}; }
};

struct ArgMin {
  double value;
  std::uint32_t index;  // first index attaining value
};

enum class Isa { Scalar, Avx2 };

bool avx2_available();
Isa active_isa();
// Overrides the runtime choice; requesting Avx2 on a machine without it throws.
void set_isa(Isa isa);
const char* to_string(Isa isa);

// out[j] = <a, b_j>
void inner_batch(const LorentzVec& a, const SoA4& b, double* out);
// min_j |<a, b_j>|; b must be nonempty.
ArgMin min_abs_inner(const LorentzVec& a, const SoA4& b);

namespace scalar {
void inner_batch(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                 std::size_t n, double* out);
ArgMin min_abs_inner(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                     std::size_t n);
}  // namespace scalar

namespace avx2 {
void inner_batch(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                 std::size_t n, double* out);
ArgMin min_abs_inner(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                     std::size_t n);
}  // namespace avx2

}  // namespace ads3::kernels
