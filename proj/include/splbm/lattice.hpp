#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "splbm/errors.hpp"

namespace splbm {

template <class T>
using Vec3 = Eigen::Matrix<T, 3, 1>;

enum class Arrangement { D2Q9, D3Q19, D3Q27 };

/// Immutable constants of a lattice arrangement. Direction 0 is the rest
/// direction; the remaining directions are ordered by the number of nonzero
/// components (axis directions first, then planar diagonals, then full
/// diagonals), with opposite directions stored in adjacent pairs.
struct LatticeDescriptor {
  Arrangement arrangement;
  int d;  // spatial dimension
  int q;  // number of lattice links

  // Unit direction vectors (ez = 0 in 2D). In lattice units dx = dt = 1, so
  // the velocity vectors c_i coincide with e_i.
  std::vector<std::array<int, 3>> e;
  std::vector<double> w;      // weights
  std::vector<int> opposite;  // opposite[i] has e = -e[i]

  // Direction-class counts: toward tile faces / edges / corners.
  int q_s;
  int q_d;
  int q_t;

  static constexpr double c_s2 = 1.0 / 3.0;  // squared lattice speed of sound

  /// Number of nonzero components of direction i.
  int crossings(int i) const {
    const auto& v = e[i];
    return (v[0] != 0) + (v[1] != 0) + (v[2] != 0);
  }
};

/// Returns the shared immutable descriptor for an arrangement. D3Q27 is
/// provided for cost accounting only; the solver supports D2Q9 and D3Q19.
const LatticeDescriptor& lattice_descriptor(Arrangement arrangement);

enum class Compressibility { QuasiCompressible, Incompressible };
enum class CollisionKind { BGK, MRT };

struct FluidModel {
  Compressibility compressibility = Compressibility::QuasiCompressible;
  CollisionKind collision = CollisionKind::BGK;
  double tau = 1.0;  // relaxation time, > 0.5
  // One relaxation rate per moment for MRT; empty selects the defaults
  // (conserved moments 0, all others 1/tau).
  std::vector<double> mrt_rates;

  double viscosity() const { return (tau - 0.5) / 3.0; }
};

template <class T>
struct Moments {
  T rho;
  Vec3<T> u;
};

/// Equilibrium distribution for the given macroscopic state. Writes q values.
template <class T>
void equilibrium(const LatticeDescriptor& lat, const FluidModel& model, T rho,
                 const Vec3<T>& u, std::span<T> out) {
  if (model.compressibility == Compressibility::QuasiCompressible && !(rho > T(0))) {
    throw DomainError("equilibrium requires rho > 0 for the quasi-compressible model");
  }
  const T inv_cs2 = T(3);
  const T inv_2cs4 = T(4.5);
  const T half_inv_cs2 = T(1.5);
  const T uu = u.squaredNorm();
  for (int i = 0; i < lat.q; ++i) {
    const T cu = T(lat.e[i][0]) * u[0] + T(lat.e[i][1]) * u[1] + T(lat.e[i][2]) * u[2];
    const T shape = cu * inv_cs2 + cu * cu * inv_2cs4 - uu * half_inv_cs2;
    if (model.compressibility == Compressibility::QuasiCompressible) {
      out[i] = T(lat.w[i]) * rho * (T(1) + shape);
    } else {
      out[i] = T(lat.w[i]) * (rho + shape);
    }
  }
}

/// Macroscopic density and velocity of a distribution.
template <class T>
Moments<T> moments(const LatticeDescriptor& lat, const FluidModel& model,
                   std::span<const T> f) {
  T rho = T(0);
  Vec3<T> m = Vec3<T>::Zero();
  for (int i = 0; i < lat.q; ++i) {
    rho += f[i];
    m[0] += T(lat.e[i][0]) * f[i];
    m[1] += T(lat.e[i][1]) * f[i];
    m[2] += T(lat.e[i][2]) * f[i];
  }
  if (model.compressibility == Compressibility::QuasiCompressible) {
    if (rho == T(0)) {
      throw DomainError("moments: zero density under the quasi-compressible model");
    }
    m /= rho;
  }
  return {rho, m};
}

/// Pressure associated with a density, p = rho / 3.
inline double pressure(double rho) { return rho / 3.0; }

/// BGK collision, in place: f += (f_eq - f) / tau.
template <class T>
Moments<T> collide_bgk(const LatticeDescriptor& lat, const FluidModel& model,
                       std::span<T> f) {
  const Moments<T> mom = moments<T>(lat, model, f);
  const T inv_tau = T(1) / T(model.tau);
  T feq[32];
  equilibrium<T>(lat, model, mom.rho, mom.u, std::span<T>(feq, lat.q));
  for (int i = 0; i < lat.q; ++i) f[i] += inv_tau * (feq[i] - f[i]);
  return mom;
}

/// MRT collision, in place: f += M^-1 S M (f_eq - f). Convenience entry that
/// builds the moment-space operator on each call; time stepping uses the
/// prebuilt CollisionOperator instead.
template <class T>
Moments<T> collide_mrt(const LatticeDescriptor& lat, const FluidModel& model,
                       std::span<T> f);

}  // namespace splbm
