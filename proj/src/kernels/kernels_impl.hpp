#pragma once

#include <cstddef>

namespace vbd::kernels::scalar {
void upwind_face_flux(std::size_t n, double u0, double slope, const double* coord, const double* left,
                      const double* right, double* out);
void upwind_apply(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy, double cz,
                  double cy, double* out);
double sum(std::size_t n, const double* x);
}  // namespace vbd::kernels::scalar

namespace vbd::kernels::avx2 {
bool compiled();
void upwind_face_flux(std::size_t n, double u0, double slope, const double* coord, const double* left,
                      const double* right, double* out);
void upwind_apply(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy, double cz,
                  double cy, double* out);
double sum(std::size_t n, const double* x);
}  // namespace vbd::kernels::avx2
