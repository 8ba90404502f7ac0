#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace splbm {

/// Macroscopic density and velocity over the geometry grid (unpadded),
/// always in double precision. Solid nodes carry zeros and mask = 0.
struct FieldData {
  int d = 2;
  std::array<int, 3> dims{0, 0, 1};
  std::vector<std::uint8_t> mask;  // 1 = non-solid
  std::vector<double> rho, ux, uy, uz;

  std::size_t size() const { return rho.size(); }
  std::size_t index(int x, int y, int z = 0) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(y) +
                                                static_cast<std::size_t>(dims[1]) * z);
  }

  double total_mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (mask[i]) m += rho[i];
    }
    return m;
  }

  bool all_finite() const {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (!mask[i]) continue;
      if (!std::isfinite(rho[i]) || !std::isfinite(ux[i]) || !std::isfinite(uy[i]) ||
          !std::isfinite(uz[i])) {
        return false;
      }
    }
    return true;
  }
};

/// Largest per-field deviation over non-solid nodes, relative to the global
/// magnitude of that field (so zero-velocity regions do not inflate it).
inline double linf_rel_diff(const FieldData& a, const FieldData& b) {
  const std::vector<double>* fa[] = {&a.rho, &a.ux, &a.uy, &a.uz};
  const std::vector<double>* fb[] = {&b.rho, &b.ux, &b.uy, &b.uz};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.rho.size(); ++i) {
      if (!a.mask[i]) continue;
      scale = std::max({scale, std::abs((*fa[k])[i]), std::abs((*fb[k])[i])});
      diff = std::max(diff, std::abs((*fa[k])[i] - (*fb[k])[i]));
    }
    if (scale > 0.0) worst = std::max(worst, diff / scale);
  }
  return worst;
}

}  // namespace splbm
