#include <atomic>

#include "ads3/kernels.hpp"

namespace ads3::kernels {

namespace {

Isa detect() { return avx2_available() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw Error(ErrorCode::ConfigInvalid, "AVX2 not supported on this CPU");
  current().store(isa);
}

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void inner_batch(const LorentzVec& a, const SoA4& b, double* out) {
  if (active_isa() == Isa::Avx2)
    avx2::inner_batch(a, b.x1.data(), b.x2.data(), b.x3.data(), b.x4.data(), b.size(), out);
  else
    scalar::inner_batch(a, b.x1.data(), b.x2.data(), b.x3.data(), b.x4.data(), b.size(), out);
}

ArgMin min_abs_inner(const LorentzVec& a, const SoA4& b) {
  if (active_isa() == Isa::Avx2)
    return avx2::min_abs_inner(a, b.x1.data(), b.x2.data(), b.x3.data(), b.x4.data(), b.size());
  return scalar::min_abs_inner(a, b.x1.data(), b.x2.data(), b.x3.data(), b.x4.data(), b.size());
}

}  // namespace ads3::kernels
