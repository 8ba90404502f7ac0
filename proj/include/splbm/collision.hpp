#pragma once

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

#include "splbm/lattice.hpp"

namespace splbm {

/// Orthogonal moment basis M for MRT collisions (d'Humieres style), one row
/// per moment. Rows 0 and 3,5(,7) are the conserved density and momentum
/// moments. Supported for D2Q9 and D3Q19.
Eigen::MatrixXd mrt_moment_basis(const LatticeDescriptor& lat);

/// Indices of the conserved rows (density, momentum) in the moment basis.
std::vector<int> mrt_conserved_moments(const LatticeDescriptor& lat);

/// Default relaxation rates: 0 for conserved moments, 1/tau for the rest.
std::vector<double> default_mrt_rates(const LatticeDescriptor& lat, double tau);

/// Precomputed per-node collision kernel for one (lattice, model) pair.
/// BGK applies the scalar relaxation directly; MRT applies the dense
/// q x q matrix K = M^-1 S M to the equilibrium deviation.
template <class T>
class CollisionOperator {
 public:
  CollisionOperator(const LatticeDescriptor& lat, const FluidModel& model);

  /// Relax f toward equilibrium in place; returns the conserved moments.
  /// A state whose density broke down (non-positive under the
  /// quasi-compressible model, or non-finite) is left untouched and flagged
  /// with a NaN density so the stepper can raise the diagnostic.
  Moments<T> operator()(std::span<T> f) const {
    const auto& lat = *lat_;
    Moments<T> mom{T(0), Vec3<T>::Zero()};
    for (int i = 0; i < lat.q; ++i) {
      mom.rho += f[i];
      mom.u[0] += T(lat.e[i][0]) * f[i];
      mom.u[1] += T(lat.e[i][1]) * f[i];
      mom.u[2] += T(lat.e[i][2]) * f[i];
    }
    if (model_.compressibility == Compressibility::QuasiCompressible) {
      if (!(mom.rho > T(0)) || !std::isfinite(static_cast<double>(mom.rho))) {
        return {std::numeric_limits<T>::quiet_NaN(), Vec3<T>::Zero()};
      }
      mom.u /= mom.rho;
    }
    T feq[32];
    equilibrium<T>(lat, model_, mom.rho, mom.u, std::span<T>(feq, lat.q));
    if (kind_ == CollisionKind::BGK) {
      for (int i = 0; i < lat.q; ++i) f[i] += inv_tau_ * (feq[i] - f[i]);
    } else {
      T delta[32];
      for (int i = 0; i < lat.q; ++i) delta[i] = feq[i] - f[i];
      const T* row = kernel_.data();
      for (int i = 0; i < lat.q; ++i, row += lat.q) {
        T acc = T(0);
        for (int j = 0; j < lat.q; ++j) acc += row[j] * delta[j];
        f[i] += acc;
      }
    }
    return mom;
  }

  const LatticeDescriptor& lattice() const { return *lat_; }
  const FluidModel& model() const { return model_; }

 private:
  const LatticeDescriptor* lat_;
  FluidModel model_;
  CollisionKind kind_;
  T inv_tau_;
  std::vector<T> kernel_;  // row-major q x q, MRT only
};

extern template class CollisionOperator<float>;
extern template class CollisionOperator<double>;

template <class T>
Moments<T> collide_mrt(const LatticeDescriptor& lat, const FluidModel& model,
                       std::span<T> f) {
  FluidModel m = model;
  m.collision = CollisionKind::MRT;
  CollisionOperator<T> op(lat, m);
  return op(f);
}

}  // namespace splbm
