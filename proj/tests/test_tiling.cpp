#include <doctest.h>

#include <map>
#include <set>

#include "splbm/tiling.hpp"
#include "test_util.hpp"

using namespace splbm;

namespace {

const LatticeDescriptor& d2q9() { return lattice_descriptor(Arrangement::D2Q9); }
const LatticeDescriptor& d3q19() { return lattice_descriptor(Arrangement::D3Q19); }

// Brute-force tile porosity oracle: counts non-solid nodes per tile cell over
// the solid-padded grid, independent of the TileGrid construction.
double phi_t_oracle(const Geometry& g, int a) {
  const int gx = (g.dims[0] + a - 1) / a;
  const int gy = (g.dims[1] + a - 1) / a;
  const int gz = g.d == 3 ? (g.dims[2] + a - 1) / a : 1;
  const int az = g.d == 3 ? a : 1;
  long fluid_total = 0;
  long nonempty = 0;
  for (int cz = 0; cz < gz; ++cz) {
    for (int cy = 0; cy < gy; ++cy) {
      for (int cx = 0; cx < gx; ++cx) {
        long fluid = 0;
        for (int lz = 0; lz < az; ++lz) {
          for (int ly = 0; ly < a; ++ly) {
            for (int lx = 0; lx < a; ++lx) {
              const int x = cx * a + lx, y = cy * a + ly, z = cz * az + lz;
              if (x >= g.dims[0] || y >= g.dims[1] || z >= g.dims[2]) continue;
              fluid += !is_solid(g.at(x, y, z));
            }
          }
        }
        if (fluid > 0) {
          ++nonempty;
          fluid_total += fluid;
        }
      }
    }
  }
  const long n_tn = static_cast<long>(a) * a * az;
  return nonempty == 0 ? 0.0
                       : static_cast<double>(fluid_total) /
                             (static_cast<double>(nonempty) * n_tn);
}

}  // namespace

TEST_SUITE_BEGIN("tiling");

TEST_CASE("schema slot counts follow the direction classes") {
  for (Arrangement a : {Arrangement::D2Q9, Arrangement::D3Q19, Arrangement::D3Q27}) {
    const auto& lat = lattice_descriptor(a);
    const GhostSchema s = make_ghost_schema(lat);
    CHECK(static_cast<int>(s.write_slots.size()) == lat.q_s + 2 * lat.q_d + 3 * lat.q_t);
    CHECK(static_cast<int>(s.read_slots.size()) == lat.q_s + 3 * lat.q_d + 7 * lat.q_t);
    CHECK(s.corner_reads == (lat.d == 2 ? lat.q_d : lat.q_t));
  }
}

TEST_CASE("all-solid geometry leaves no tiles") {
  Geometry g(2, {32, 32, 1});
  std::fill(g.types.begin(), g.types.end(), NodeType::Solid);
  const TileGrid tg = build_tile_grid(g, 16, d2q9());
  CHECK(tg.tile_count() == 4);
  CHECK(tg.fluid_tile_count() == 0);
  const TileStats st = tile_stats(tg);
  CHECK(st.phi_t == 0.0);
  CHECK(st.alpha_m == 0.0);
  CHECK(st.alpha_b == 0.0);
}

TEST_CASE("all-fluid geometry keeps every tile at full porosity") {
  Geometry g(2, {32, 32, 1});
  const TileGrid tg = build_tile_grid(g, 16, d2q9());
  CHECK(tg.tile_count() == 4);
  CHECK(tg.fluid_tile_count() == 4);
  const TileStats st = tile_stats(tg);
  CHECK(st.phi_t == 1.0);
  CHECK(st.ratio_tiles == 1.0);
}

TEST_CASE("a 33x32 domain pads to 48x32 with partially fluid tiles") {
  Geometry g(2, {33, 32, 1});
  const TileGrid tg = build_tile_grid(g, 16, d2q9());
  CHECK(tg.padded_dims[0] == 48);
  CHECK(tg.padded_dims[1] == 32);
  CHECK(tg.tile_count() == 6);
  CHECK(tg.fluid_tile_count() == 6);
  const TileStats st = tile_stats(tg);
  CHECK(st.phi_t == doctest::Approx(phi_t_oracle(g, 16)).epsilon(1e-15));
  CHECK(st.phi_t == doctest::Approx(1056.0 / 1536.0).epsilon(1e-15));
}

TEST_CASE("tile edge below 2 and dimension mismatch are rejected") {
  Geometry g(2, {16, 16, 1});
  CHECK_THROWS_AS(build_tile_grid(g, 1, d2q9()), ConfigError);
  CHECK_THROWS_AS(build_tile_grid(g, 4, d3q19()), ConfigError);
  Periodicity per;
  per.x = true;
  CHECK_THROWS_AS(build_tile_grid(Geometry(2, {30, 32, 1}), 16, d2q9(), per), ConfigError);
}

TEST_CASE("node conservation and tile map consistency") {
  GenerateParams p;
  p.dims = {48, 48, 48};
  p.sphere_diameter = 12;
  p.target_porosity = 0.75;
  p.seed = 9;
  const Geometry g = generate(GeometryKind::Ras3D, p);
  const TileGrid tg = build_tile_grid(g, 4, d3q19());

  std::size_t fluid = 0;
  for (const Tile& t : tg.tiles) fluid += t.fluid_count;
  CHECK(fluid == g.fluid_count());

  // Every non-empty cell points at the tile whose origin matches; every empty
  // cell covers an all-solid block.
  for (int cz = 0; cz < tg.grid_dims[2]; ++cz) {
    for (int cy = 0; cy < tg.grid_dims[1]; ++cy) {
      for (int cx = 0; cx < tg.grid_dims[0]; ++cx) {
        const TileIndex t = tg.tile_map[tg.cell_index(cx, cy, cz)];
        if (t != kEmptyTile) {
          REQUIRE(tg.tiles[t].origin ==
                  std::array<int, 3>{cx * tg.a, cy * tg.a, cz * tg.a});
        } else {
          for (int lz = 0; lz < tg.a; ++lz) {
            for (int ly = 0; ly < tg.a; ++ly) {
              for (int lx = 0; lx < tg.a; ++lx) {
                const int x = cx * tg.a + lx, y = cy * tg.a + ly, z = cz * tg.a + lz;
                if (x >= g.dims[0] || y >= g.dims[1] || z >= g.dims[2]) continue;
                REQUIRE(is_solid(g.at(x, y, z)));
              }
            }
          }
        }
      }
    }
  }

  const double phi = porosity(g).phi;
  const TileStats st = tile_stats(tg);
  CHECK(phi <= st.phi_t);
}

TEST_CASE("ghost topology pairs every write slot with matching reads") {
  GenerateParams p;
  p.dims = {40, 40, 1};
  const Geometry cavity = generate(GeometryKind::Cavity2D, p);
  GenerateParams r;
  r.dims = {24, 24, 24};
  r.sphere_diameter = 8;
  r.target_porosity = 0.7;
  r.seed = 3;
  const Geometry ras = generate(GeometryKind::Ras3D, r);

  struct Case {
    const Geometry* g;
    const LatticeDescriptor* lat;
    int a;
  };
  for (const Case& c : {Case{&cavity, &d2q9(), 8}, Case{&ras, &d3q19(), 4}}) {
    const TileGrid tg = build_tile_grid(*c.g, c.a, *c.lat);
    std::map<BufferIndex, int> writer_dir;
    std::map<BufferIndex, int> writer_count;
    for (std::size_t t = 0; t < tg.fluid_tile_count(); ++t) {
      for (std::size_t s = 0; s < tg.schema.write_slots.size(); ++s) {
        const BufferIndex b = tg.write_buffer(t, s);
        if (b == kAbsentBuffer) continue;
        writer_dir[b] = tg.schema.write_slots[s].dir;
        ++writer_count[b];
      }
    }
    // Exactly one writer per buffer and full coverage of the pool.
    CHECK(writer_dir.size() == tg.buffer_count);
    for (const auto& [b, n] : writer_count) CHECK(n == 1);

    std::set<BufferIndex> read_buffers;
    for (std::size_t t = 0; t < tg.fluid_tile_count(); ++t) {
      for (std::size_t s = 0; s < tg.schema.read_slots.size(); ++s) {
        const BufferIndex b = tg.read_buffer(t, s);
        if (b == kAbsentBuffer) continue;
        read_buffers.insert(b);
        // A read slot carries the same direction its writer stored.
        REQUIRE(writer_dir.count(b) == 1);
        REQUIRE(writer_dir[b] == tg.schema.read_slots[s].dir);
      }
    }
    // Every allocated buffer is read by someone (that is why it exists).
    CHECK(read_buffers.size() == tg.buffer_count);
  }
}

TEST_CASE("periodic all-fluid tiling allocates every possible buffer") {
  Geometry g(2, {64, 64, 1});
  Periodicity per;
  per.x = per.y = true;
  const TileGrid tg = build_tile_grid(g, 16, d2q9(), per);
  const TileStats st = tile_stats(tg);
  CHECK(st.alpha_m == 1.0);
  CHECK(st.alpha_b == 1.0);
  CHECK(st.reduced_buffer_fraction == 0.0);

  Geometry g3(3, {16, 16, 16});
  Periodicity per3;
  per3.x = per3.y = per3.z = true;
  const TileGrid tg3 = build_tile_grid(g3, 4, d3q19(), per3);
  const TileStats st3 = tile_stats(tg3);
  CHECK(st3.alpha_m == 1.0);
  CHECK(st3.alpha_b == 1.0);
}

TEST_CASE("sphere-pack tiling reaches high tile porosity with few reduced buffers") {
  GenerateParams p;
  p.dims = {96, 96, 96};
  p.sphere_diameter = 40;
  p.target_porosity = 0.9;
  p.seed = 21;
  const Geometry g = generate(GeometryKind::Ras3D, p);
  const TileGrid tg = build_tile_grid(g, 4, d3q19());
  const TileStats st = tile_stats(tg);
  CHECK(st.phi_t >= 0.94);
  CHECK(st.alpha_m > 0.9);
  CHECK(st.alpha_m < 1.0);
  CHECK(st.alpha_b <= st.alpha_m);
  CHECK(st.reduced_buffer_fraction <= 0.04);
  CHECK(st.ratio_tiles >= 1.0);
}

TEST_SUITE_END();
