#include "splbm/lattice.hpp"

#include <algorithm>

namespace splbm {
namespace {

LatticeDescriptor build_descriptor(Arrangement arrangement) {
  LatticeDescriptor lat;
  lat.arrangement = arrangement;
  switch (arrangement) {
    case Arrangement::D2Q9:
      lat.d = 2;
      lat.q = 9;
      lat.q_s = 4;
      lat.q_d = 4;
      lat.q_t = 0;
      lat.e = {
          {0, 0, 0},
          {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0},
          {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
      };
      lat.w = {4.0 / 9.0,
               1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0,
               1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};
      break;
    case Arrangement::D3Q19:
      lat.d = 3;
      lat.q = 19;
      lat.q_s = 6;
      lat.q_d = 12;
      lat.q_t = 0;
      lat.e = {
          {0, 0, 0},
          {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
          {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
          {1, 0, 1}, {-1, 0, -1}, {1, 0, -1}, {-1, 0, 1},
          {0, 1, 1}, {0, -1, -1}, {0, 1, -1}, {0, -1, 1},
      };
      lat.w.assign(19, 1.0 / 36.0);
      lat.w[0] = 1.0 / 3.0;
      for (int i = 1; i <= 6; ++i) lat.w[i] = 1.0 / 18.0;
      break;
    case Arrangement::D3Q27:
      lat.d = 3;
      lat.q = 27;
      lat.q_s = 6;
      lat.q_d = 12;
      lat.q_t = 8;
      lat.e = {
          {0, 0, 0},
          {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
          {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
          {1, 0, 1}, {-1, 0, -1}, {1, 0, -1}, {-1, 0, 1},
          {0, 1, 1}, {0, -1, -1}, {0, 1, -1}, {0, -1, 1},
          {1, 1, 1}, {-1, -1, -1}, {1, 1, -1}, {-1, -1, 1},
          {1, -1, 1}, {-1, 1, -1}, {1, -1, -1}, {-1, 1, 1},
      };
      lat.w.assign(27, 1.0 / 216.0);
      lat.w[0] = 8.0 / 27.0;
      for (int i = 1; i <= 6; ++i) lat.w[i] = 2.0 / 27.0;
      for (int i = 7; i <= 18; ++i) lat.w[i] = 1.0 / 54.0;
      break;
  }
  lat.opposite.assign(lat.q, 0);
  for (int i = 0; i < lat.q; ++i) {
    for (int j = 0; j < lat.q; ++j) {
      if (lat.e[j][0] == -lat.e[i][0] && lat.e[j][1] == -lat.e[i][1] &&
          lat.e[j][2] == -lat.e[i][2]) {
        lat.opposite[i] = j;
        break;
      }
    }
  }
  return lat;
}

}  // namespace

const LatticeDescriptor& lattice_descriptor(Arrangement arrangement) {
  static const LatticeDescriptor d2q9 = build_descriptor(Arrangement::D2Q9);
  static const LatticeDescriptor d3q19 = build_descriptor(Arrangement::D3Q19);
  static const LatticeDescriptor d3q27 = build_descriptor(Arrangement::D3Q27);
  switch (arrangement) {
    case Arrangement::D2Q9: return d2q9;
    case Arrangement::D3Q19: return d3q19;
    case Arrangement::D3Q27: return d3q27;
  }
  throw ConfigError("unknown lattice arrangement");
}

}  // namespace splbm
