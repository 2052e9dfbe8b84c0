#include "kernels_impl.hpp"

namespace vbd::kernels::scalar {

void upwind_face_flux(std::size_t n, double u0, double slope, const double* coord, const double* left,
                      const double* right, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const double u = u0 + slope * coord[j];
    const double up = u > 0.0 ? u : 0.0;
    const double um = u < 0.0 ? u : 0.0;
    out[j] = up * left[j] + um * right[j];
  }
}

void upwind_apply(std::size_t n, const double* cur, const double* fl, const double* fr, const double* fy, double cz,
                  double cy, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = (cur[j] + cz * (fl[j] - fr[j])) + cy * (fy[j] - fy[j + 1]);
  }
}

double sum(std::size_t n, const double* x) {
  double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    for (int l = 0; l < 8; ++l) lane[l] += x[i + l];
  }
  const double s0 = lane[0] + lane[4];
  const double s1 = lane[1] + lane[5];
  const double s2 = lane[2] + lane[6];
  const double s3 = lane[3] + lane[7];
  double total = (s0 + s1) + (s2 + s3);
  for (std::size_t i = body; i < n; ++i) total += x[i];
  return total;
}

}  // namespace vbd::kernels::scalar
