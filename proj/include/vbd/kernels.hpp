#pragma once

#include <cstddef>

// Inner loops of the upwind transport step. Every variant produces results
// bitwise identical to the scalar reference.
namespace vbd::kernels {

enum class Isa { Scalar, Avx2 };

/// out[j] = max(u_j, 0) left[j] + min(u_j, 0) right[j], u_j = u0 + slope coord[j].
using FaceFluxFn = void (*)(std::size_t n, double u0, double slope, const double* coord, const double* left,
                            const double* right, double* out);
/// out[j] = cur[j] + cz (fl[j] - fr[j]) + cy (fy[j] - fy[j + 1]); fy has n + 1 entries.
using ApplyFn = void (*)(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy,
                         double cz, double cy, double* out);
/// Sum accumulated in eight interleaved lanes, then reduced in a fixed tree.
using SumFn = double (*)(std::size_t n, const double* x);

struct Table {
  Isa isa;
  FaceFluxFn upwind_face_flux;
  ApplyFn upwind_apply;
  SumFn sum;
};

const Table& scalar_table();
/// nullptr when the binary or the CPU lacks AVX2.
const Table* avx2_table();

/// Best table for this CPU unless force_scalar(true) is in effect.
const Table& active();
void force_scalar(bool on);
const char* isa_name(Isa isa);

inline void upwind_face_flux(std::size_t n, double u0, double slope, const double* coord, const double* left,
                             const double* right, double* out) {
  active().upwind_face_flux(n, u0, slope, coord, left, right, out);
}
inline void upwind_apply(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy,
                         double cz, double cy, double* out) {
  active().upwind_apply(n, cur, fl, fr, fy, cz, cy, out);
}
inline double sum(std::size_t n, const double* x) { return active().sum(n, x); }

}  // namespace vbd::kernels
