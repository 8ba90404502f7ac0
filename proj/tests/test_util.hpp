#pragma once

#include <random>
#include <vector>

#include "splbm/geometry.hpp"
#include "splbm/lattice.hpp"

namespace splbm::testing {

/// Random distribution near equilibrium with density around 1.
inline std::vector<double> random_state(const LatticeDescriptor& lat,
                                        std::mt19937_64& rng, double spread = 0.3) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> f(static_cast<std::size_t>(lat.q));
  for (int i = 0; i < lat.q; ++i) f[static_cast<std::size_t>(i)] = lat.w[i] * (1.0 + u(rng));
  return f;
}

/// All-fluid geometry of the given size.
inline Geometry open_box(int d, std::array<int, 3> dims) { return Geometry(d, dims); }

/// Geometry whose domain boundary ring is solid and interior fluid.
inline Geometry closed_box(int d, std::array<int, 3> dims) {
  Geometry g(d, dims);
  for (int z = 0; z < dims[2]; ++z) {
    for (int y = 0; y < dims[1]; ++y) {
      for (int x = 0; x < dims[0]; ++x) {
        const bool wall = x == 0 || x == dims[0] - 1 || y == 0 || y == dims[1] - 1 ||
                          (d == 3 && (z == 0 || z == dims[2] - 1));
        if (wall) g.at(x, y, z) = NodeType::Solid;
      }
    }
  }
  return g;
}

/// Deterministic smooth pseudo-random initial field for perturbation tests.
inline std::pair<double, Eigen::Vector3d> wavy_init(int x, int y, int z) {
  const double rho = 1.0 + 0.02 * std::sin(0.37 * x + 0.11) * std::cos(0.23 * y - 0.05) *
                               std::cos(0.19 * z + 0.4);
  Eigen::Vector3d u(0.01 * std::sin(0.21 * x + 0.53 * y),
                    0.01 * std::cos(0.17 * y + 0.29 * z),
                    0.01 * std::sin(0.13 * z + 0.41 * x));
  return {rho, u};
}

}  // namespace splbm::testing
