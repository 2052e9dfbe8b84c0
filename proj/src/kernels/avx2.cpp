#include "kernels_impl.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace vbd::kernels::avx2 {

bool compiled() { return true; }

void upwind_face_flux(std::size_t n, double u0, double slope, const double* coord, const double* left,
                      const double* right, double* out) {
  const __m256d vu0 = _mm256_set1_pd(u0);
  const __m256d vs = _mm256_set1_pd(slope);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d u = _mm256_add_pd(vu0, _mm256_mul_pd(vs, _mm256_loadu_pd(coord + j)));
    const __m256d up = _mm256_max_pd(u, zero);
    const __m256d um = _mm256_min_pd(u, zero);
    const __m256d f = _mm256_add_pd(_mm256_mul_pd(up, _mm256_loadu_pd(left + j)),
                                    _mm256_mul_pd(um, _mm256_loadu_pd(right + j)));
    _mm256_storeu_pd(out + j, f);
  }
  if (j < n) scalar::upwind_face_flux(n - j, u0, slope, coord + j, left + j, right + j, out + j);
}

void upwind_apply(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy, double cz,
                  double cy, double* out) {
  const __m256d vcz = _mm256_set1_pd(cz);
  const __m256d vcy = _mm256_set1_pd(cy);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(fl + j), _mm256_loadu_pd(fr + j));
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(fy + j), _mm256_loadu_pd(fy + j + 1));
    const __m256d r = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(cur + j), _mm256_mul_pd(vcz, dz)),
                                    _mm256_mul_pd(vcy, dy));
    _mm256_storeu_pd(out + j, r);
  }
  if (j < n) scalar::upwind_apply(n - j, cur + j, fl + j, fr + j, fy + j, cz, cy, out + j);
}

double sum(std::size_t n, const double* x) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    lo = _mm256_add_pd(lo, _mm256_loadu_pd(x + i));
    hi = _mm256_add_pd(hi, _mm256_loadu_pd(x + i + 4));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, _mm256_add_pd(lo, hi));
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (std::size_t i = body; i < n; ++i) total += x[i];
  return total;
}

}  // namespace vbd::kernels::avx2

#else

namespace vbd::kernels::avx2 {
bool compiled() { return false; }
void upwind_face_flux(std::size_t n, double u0, double slope, const double* coord, const double* left,
                      const double* right, double* out) {
  scalar::upwind_face_flux(n, u0, slope, coord, left, right, out);
}
void upwind_apply(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy, double cz,
                  double cy, double* out) {
  scalar::upwind_apply(n, cur, fl, fr, fy, cz, cy, out);
}
double sum(std::size_t n, const double* x) { return scalar::sum(n, x); }
}  // namespace vbd::kernels::avx2

#endif
