#include "vbd/grid.hpp"

#include <algorithm>
#include <cmath>

#include "vbd/errors.hpp"

namespace vbd {

Grid2D make_grid(double z_min, double z_max, double y0, double y_max_min, int nz, int ny) {
  if (nz < 8 || ny < 8) throw Error(ErrorKind::InvalidArgument, "grid needs at least 8 cells per direction");
  if (!(z_max > z_min) || !(y0 > 0.0) || !(y_max_min > y0)) {
    throw Error(ErrorKind::InvalidArgument, "grid extents must satisfy z_max > z_min and y_max > y0 > 0");
  }
  Grid2D g;
  g.z_min = z_min;
  g.z_max = z_max;
  g.nz = nz;
  g.ny = ny;
  g.dz = (z_max - z_min) / nz;
  g.y0 = y0;
  const double dy_min = y_max_min / ny;
  g.inflow_cells = std::max(1, static_cast<int>(std::floor(y0 / dy_min)));
  g.dy = y0 / g.inflow_cells;
  g.y_max = g.dy * ny;
  if (g.inflow_cells >= ny) throw Error(ErrorKind::InvalidArgument, "grid leaves no cells above y0");
  return g;
}

Grid2D build_grid(const WithinHostParams& p, double margin, int nz, int ny) {
  require_valid(p);
  if (!(margin >= 0.0)) throw Error(ErrorKind::InvalidArgument, "margin must be non-negative");
  const CharacteristicExtent ext = characteristic_extent(p, 0.0);
  return make_grid(p.z0, (1.0 + margin) * ext.z_max, p.y0(), (1.0 + margin) * ext.y_max, nz, ny);
}

}  // namespace vbd
