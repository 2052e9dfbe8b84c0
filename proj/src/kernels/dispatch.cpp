#include <atomic>

#include "kernels_impl.hpp"
#include "vbd/kernels.hpp"

namespace vbd::kernels {
namespace {

std::atomic<bool> g_force_scalar{false};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

const Table& scalar_table() {
  static const Table t{Isa::Scalar, &scalar::upwind_face_flux, &scalar::upwind_apply, &scalar::sum};
  return t;
}

const Table* avx2_table() {
  static const Table t{Isa::Avx2, &avx2::upwind_face_flux, &avx2::upwind_apply, &avx2::sum};
  static const bool usable = avx2::compiled() && cpu_has_avx2();
  return usable ? &t : nullptr;
}

const Table& active() {
  if (!g_force_scalar.load(std::memory_order_relaxed)) {
    if (const Table* t = avx2_table()) return *t;
  }
  return scalar_table();
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace vbd::kernels
