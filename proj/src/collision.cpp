#include "splbm/collision.hpp"

#include <cmath>

namespace splbm {
namespace {

// Moment polynomials evaluated on the direction vectors. The rows are the
// classic orthogonal bases: Lallemand/Luo for D2Q9 (rho, e, eps, jx, qx, jy,
// qy, pxx, pxy) and d'Humieres for D3Q19.
Eigen::MatrixXd basis_d2q9(const LatticeDescriptor& lat) {
  Eigen::MatrixXd m(9, 9);
  for (int i = 0; i < 9; ++i) {
    const double ex = lat.e[i][0];
    const double ey = lat.e[i][1];
    const double e2 = ex * ex + ey * ey;
    m(0, i) = 1.0;
    m(1, i) = -4.0 + 3.0 * e2;
    m(2, i) = 4.0 - 10.5 * e2 + 4.5 * e2 * e2;
    m(3, i) = ex;
    m(4, i) = (-5.0 + 3.0 * e2) * ex;
    m(5, i) = ey;
    m(6, i) = (-5.0 + 3.0 * e2) * ey;
    m(7, i) = ex * ex - ey * ey;
    m(8, i) = ex * ey;
  }
  return m;
}

Eigen::MatrixXd basis_d3q19(const LatticeDescriptor& lat) {
  Eigen::MatrixXd m(19, 19);
  for (int i = 0; i < 19; ++i) {
    const double ex = lat.e[i][0];
    const double ey = lat.e[i][1];
    const double ez = lat.e[i][2];
    const double e2 = ex * ex + ey * ey + ez * ez;
    m(0, i) = 1.0;
    m(1, i) = 19.0 * e2 - 30.0;
    m(2, i) = 0.5 * (21.0 * e2 * e2 - 53.0 * e2 + 24.0);
    m(3, i) = ex;
    m(4, i) = (5.0 * e2 - 9.0) * ex;
    m(5, i) = ey;
    m(6, i) = (5.0 * e2 - 9.0) * ey;
    m(7, i) = ez;
    m(8, i) = (5.0 * e2 - 9.0) * ez;
    m(9, i) = 3.0 * ex * ex - e2;
    m(10, i) = (3.0 * e2 - 5.0) * (3.0 * ex * ex - e2);
    m(11, i) = ey * ey - ez * ez;
    m(12, i) = (3.0 * e2 - 5.0) * (ey * ey - ez * ez);
    m(13, i) = ex * ey;
    m(14, i) = ey * ez;
    m(15, i) = ex * ez;
    m(16, i) = (ey * ey - ez * ez) * ex;
    m(17, i) = (ez * ez - ex * ex) * ey;
    m(18, i) = (ex * ex - ey * ey) * ez;
  }
  return m;
}

}  // namespace

Eigen::MatrixXd mrt_moment_basis(const LatticeDescriptor& lat) {
  switch (lat.arrangement) {
    case Arrangement::D2Q9: return basis_d2q9(lat);
    case Arrangement::D3Q19: return basis_d3q19(lat);
    default:
      throw ConfigError("MRT is supported for D2Q9 and D3Q19 only");
  }
}

std::vector<int> mrt_conserved_moments(const LatticeDescriptor& lat) {
  switch (lat.arrangement) {
    case Arrangement::D2Q9: return {0, 3, 5};
    case Arrangement::D3Q19: return {0, 3, 5, 7};
    default:
      throw ConfigError("MRT is supported for D2Q9 and D3Q19 only");
  }
}

std::vector<double> default_mrt_rates(const LatticeDescriptor& lat, double tau) {
  std::vector<double> rates(lat.q, 1.0 / tau);
  for (int idx : mrt_conserved_moments(lat)) rates[idx] = 0.0;
  return rates;
}

template <class T>
CollisionOperator<T>::CollisionOperator(const LatticeDescriptor& lat,
                                        const FluidModel& model)
    : lat_(&lat), model_(model), kind_(model.collision) {
  if (!(model.tau > 0.5)) {
    throw ConfigError("relaxation time tau must be > 0.5");
  }
  inv_tau_ = T(1.0 / model.tau);
  if (kind_ != CollisionKind::MRT) return;

  const Eigen::MatrixXd m = mrt_moment_basis(lat);
  std::vector<double> rates = model.mrt_rates.empty()
                                  ? default_mrt_rates(lat, model.tau)
                                  : model.mrt_rates;
  if (static_cast<int>(rates.size()) != lat.q) {
    throw ConfigError("mrt_rates must have one entry per moment (" +
                      std::to_string(lat.q) + ")");
  }
  // Rows are mutually orthogonal, so M^-1 = M^T diag(1 / |row|^2).
  Eigen::VectorXd row_norm2 = (m * m.transpose()).diagonal();
  Eigen::MatrixXd minv = m.transpose() * row_norm2.cwiseInverse().asDiagonal();
  Eigen::MatrixXd s = Eigen::Map<Eigen::VectorXd>(rates.data(), lat.q).asDiagonal();
  Eigen::MatrixXd kernel = minv * s * m;
  kernel_.resize(static_cast<std::size_t>(lat.q) * lat.q);
  for (int i = 0; i < lat.q; ++i)
    for (int j = 0; j < lat.q; ++j)
      kernel_[static_cast<std::size_t>(i) * lat.q + j] = T(kernel(i, j));
}

template class CollisionOperator<float>;
template class CollisionOperator<double>;

}  // namespace splbm
