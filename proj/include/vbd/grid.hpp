#pragma once

#include <cstddef>

#include "vbd/within_host.hpp"

namespace vbd {

/// Cell-centered grid on [z0, z_max] x [0, y_max]. The antibody threshold y0
/// always falls on a cell face: rows iy < inflow_cells sit on the inflow part
/// of z = z0, the rest on the outflow part. The recovered density lives on
/// the cells above y0 with the same spacing. Fields are stored z-major:
/// index = iz * ny + iy.
struct Grid2D {
  double z_min = 1.0;
  double z_max = 2.0;
  double y_min = 0.0;
  double y_max = 2.0;
  int nz = 8;
  int ny = 8;
  double dz = 0.125;
  double dy = 0.25;
  double y0 = 1.0;
  int inflow_cells = 4;

  double z_center(int iz) const { return z_min + (iz + 0.5) * dz; }
  double y_center(int iy) const { return y_min + (iy + 0.5) * dy; }
  double z_face(int iz) const { return z_min + iz * dz; }
  double y_face(int iy) const { return y_min + iy * dy; }
  double cell_area() const { return dz * dy; }
  std::size_t cells() const { return static_cast<std::size_t>(nz) * static_cast<std::size_t>(ny); }
  int recovered_cells() const { return ny - inflow_cells; }
  std::size_t index(int iz, int iy) const {
    return static_cast<std::size_t>(iz) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(iy);
  }
};

/// Grid with z extent exactly [z_min, z_max]. dy is the smallest spacing
/// >= y_max_min / ny that puts y0 on a face, so y_max >= y_max_min.
Grid2D make_grid(double z_min, double z_max, double y0, double y_max_min, int nz, int ny);

/// Domain around the bounding characteristic (the one entering at y = 0),
/// padded by `margin` (z_max = (1 + margin) * max z along it, same for y).
Grid2D build_grid(const WithinHostParams& p, double margin = 0.1, int nz = 200, int ny = 340);

}  // namespace vbd
