#include "splbm/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "splbm/errors.hpp"

namespace splbm {

void write_vtk(std::ostream& out, const FieldData& f, std::array<int, 3> padded_dims,
               const std::string& title) {
  const std::size_t n = static_cast<std::size_t>(padded_dims[0]) * padded_dims[1] *
                        padded_dims[2];
  out << "# vtk DataFile Version 3.0\n"
      << title << '\n'
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << padded_dims[0] << ' ' << padded_dims[1] << ' '
      << padded_dims[2] << '\n'
      << "ORIGIN 0 0 0\n"
      << "SPACING 1 1 1\n"
      << "POINT_DATA " << n << '\n';
  out << std::setprecision(12);

  auto value_at = [&](int x, int y, int z, const std::vector<double>& field) -> double {
    if (x >= f.dims[0] || y >= f.dims[1] || z >= f.dims[2]) return 0.0;
    const std::size_t idx = f.index(x, y, z);
    return f.mask[idx] ? field[idx] : 0.0;
  };

  out << "SCALARS density double\nLOOKUP_TABLE default\n";
  for (int z = 0; z < padded_dims[2]; ++z) {
    for (int y = 0; y < padded_dims[1]; ++y) {
      for (int x = 0; x < padded_dims[0]; ++x) {
        out << value_at(x, y, z, f.rho) << '\n';
      }
    }
  }
  out << "VECTORS velocity double\n";
  for (int z = 0; z < padded_dims[2]; ++z) {
    for (int y = 0; y < padded_dims[1]; ++y) {
      for (int x = 0; x < padded_dims[0]; ++x) {
        out << value_at(x, y, z, f.ux) << ' ' << value_at(x, y, z, f.uy) << ' '
            << value_at(x, y, z, f.uz) << '\n';
      }
    }
  }
}

void write_vtk_file(const std::string& path, const FieldData& f,
                    std::array<int, 3> padded_dims, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write snapshot: " + path);
  write_vtk(out, f, padded_dims, title);
  if (!out) throw IoError("snapshot write failed: " + path);
}

void write_csv(std::ostream& out, const FieldData& f) {
  const bool three_d = f.d == 3;
  out << (three_d ? "x,y,z,rho,ux,uy,uz\n" : "x,y,rho,ux,uy\n");
  out << std::setprecision(12);
  for (int z = 0; z < f.dims[2]; ++z) {
    for (int y = 0; y < f.dims[1]; ++y) {
      for (int x = 0; x < f.dims[0]; ++x) {
        const std::size_t i = f.index(x, y, z);
        if (!f.mask[i]) continue;
        out << x << ',' << y;
        if (three_d) out << ',' << z;
        out << ',' << f.rho[i] << ',' << f.ux[i] << ',' << f.uy[i];
        if (three_d) out << ',' << f.uz[i];
        out << '\n';
      }
    }
  }
}

void write_csv_file(const std::string& path, const FieldData& f) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write probe file: " + path);
  write_csv(out, f);
  if (!out) throw IoError("probe write failed: " + path);
}

}  // namespace splbm
