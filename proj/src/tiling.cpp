#include "splbm/tiling.hpp"

#include <bit>
#include <unordered_map>

namespace splbm {
namespace {

int sign(int v) { return (v > 0) - (v < 0); }

// Tile cell resolution with per-axis wrap; returns false when the cell falls
// outside a non-periodic axis.
bool resolve_cell(const TileGrid& tg, std::array<int, 3> c, std::array<int, 3>& out) {
  for (int k = 0; k < 3; ++k) {
    if (c[k] < 0 || c[k] >= tg.grid_dims[k]) {
      if (!tg.periodic.axis(k)) return false;
      c[k] = ((c[k] % tg.grid_dims[k]) + tg.grid_dims[k]) % tg.grid_dims[k];
    }
  }
  out = c;
  return true;
}

bool cell_nonempty(const TileGrid& tg, std::array<int, 3> c) {
  std::array<int, 3> r;
  if (!resolve_cell(tg, c, r)) return false;
  return tg.tile_map[tg.cell_index(r[0], r[1], r[2])] != kEmptyTile;
}

// Key identifying a buffer: the face between a (wrapped) lower cell and its
// +axis neighbor, together with the direction the buffer carries.
std::uint64_t buffer_key(const TileGrid& tg, std::array<int, 3> lower, int axis, int dir) {
  std::array<int, 3> r;
  (void)resolve_cell(tg, lower, r);  // caller guarantees validity
  const std::uint64_t cell = tg.cell_index(r[0], r[1], r[2]);
  return (cell * 3 + static_cast<std::uint64_t>(axis)) * 32 + static_cast<std::uint64_t>(dir);
}

// Readers of the buffer written by `writer` through face `axis` in direction
// `dir`: one per crossed-axes subset whose highest axis is the face axis.
void for_each_reader(int dir, int axis, std::array<int, 3> writer,
                     const std::vector<GhostSchema::ReadSlot>& read_slots,
                     const auto& fn) {
  for (const auto& rs : read_slots) {
    if (rs.dir != dir || rs.carrier != axis) continue;
    fn(std::array<int, 3>{writer[0] - rs.src_offset[0], writer[1] - rs.src_offset[1],
                          writer[2] - rs.src_offset[2]},
       rs);
  }
}

}  // namespace

GhostSchema make_ghost_schema(const LatticeDescriptor& lat) {
  GhostSchema s;
  for (int i = 1; i < lat.q; ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      if (lat.e[i][axis] != 0) s.write_slots.push_back({i, axis});
    }
  }
  for (int i = 1; i < lat.q; ++i) {
    unsigned nz_mask = 0;
    for (int axis = 0; axis < 3; ++axis) {
      if (lat.e[i][axis] != 0) nz_mask |= 1u << axis;
    }
    const int n_cross = lat.crossings(i);
    for (unsigned mask = 1; mask < 8; ++mask) {
      if ((mask & nz_mask) != mask) continue;
      GhostSchema::ReadSlot rs;
      rs.dir = i;
      rs.axes_mask = mask;
      rs.carrier = mask & 4 ? 2 : (mask & 2 ? 1 : 0);
      rs.corner = std::popcount(mask) == lat.d && n_cross == lat.d;
      rs.src_offset = {0, 0, 0};
      for (int axis = 0; axis < 3; ++axis) {
        if (mask & (1u << axis)) rs.src_offset[axis] = -sign(lat.e[i][axis]);
      }
      if (rs.corner) ++s.corner_reads;
      s.read_slots.push_back(rs);
    }
  }
  return s;
}

TileGrid build_tile_grid(const Geometry& g, int a, const LatticeDescriptor& lat,
                         Periodicity periodic) {
  if (a < 2) throw ConfigError("tile edge must be at least 2");
  if (lat.d != g.d) throw ConfigError("lattice dimension does not match the geometry");
  for (int k = 0; k < g.d; ++k) {
    if (periodic.axis(k) && g.dims[k] % a != 0) {
      throw ConfigError("periodic axes require dimensions divisible by the tile edge");
    }
  }

  TileGrid tg;
  tg.a = a;
  tg.d = g.d;
  tg.n_tn = a * a * (g.d == 3 ? a : 1);
  tg.buf_len = tg.n_tn / a;
  tg.lat = &lat;
  tg.periodic = periodic;
  tg.geo_dims = g.dims;
  for (int k = 0; k < 3; ++k) {
    const int extent = (k == 2 && g.d == 2) ? 1 : g.dims[k];
    const int tile_extent = (k == 2 && g.d == 2) ? 1 : a;
    tg.grid_dims[k] = (extent + tile_extent - 1) / tile_extent;
    tg.padded_dims[k] = tg.grid_dims[k] * tile_extent;
  }

  // Cover with tiles and drop the all-solid ones.
  tg.tile_map.assign(tg.cell_count(), kEmptyTile);
  const int az = g.d == 3 ? a : 1;
  for (int cz = 0; cz < tg.grid_dims[2]; ++cz) {
    for (int cy = 0; cy < tg.grid_dims[1]; ++cy) {
      for (int cx = 0; cx < tg.grid_dims[0]; ++cx) {
        Tile tile;
        tile.origin = {cx * a, cy * a, cz * az};
        tile.types.assign(static_cast<std::size_t>(tg.n_tn), NodeType::Solid);
        tile.fluid_count = 0;
        for (int lz = 0; lz < az; ++lz) {
          const int z = tile.origin[2] + lz;
          if (z >= g.dims[2]) continue;
          for (int ly = 0; ly < a; ++ly) {
            const int y = tile.origin[1] + ly;
            if (y >= g.dims[1]) continue;
            for (int lx = 0; lx < a; ++lx) {
              const int x = tile.origin[0] + lx;
              if (x >= g.dims[0]) continue;
              const NodeType t = g.at(x, y, z);
              tile.types[tg.node_offset(lx, ly, lz)] = t;
              if (!is_solid(t)) ++tile.fluid_count;
            }
          }
        }
        if (tile.fluid_count > 0) {
          tg.tile_map[tg.cell_index(cx, cy, cz)] = static_cast<TileIndex>(tg.tiles.size());
          tg.tiles.push_back(std::move(tile));
        }
      }
    }
  }

  tg.schema = make_ghost_schema(lat);
  const std::size_t n_ftiles = tg.tiles.size();
  tg.write_buffers.assign(n_ftiles * tg.schema.write_slots.size(), kAbsentBuffer);
  tg.read_buffers.assign(n_ftiles * tg.schema.read_slots.size(), kAbsentBuffer);

  std::unordered_map<std::uint64_t, BufferIndex> directory;

  // Allocation pass: a buffer exists when its writer tile is non-empty and at
  // least one tile reads through it (directly or via a diagonal passage).
  std::size_t t = 0;
  for (int cz = 0; cz < tg.grid_dims[2]; ++cz) {
    for (int cy = 0; cy < tg.grid_dims[1]; ++cy) {
      for (int cx = 0; cx < tg.grid_dims[0]; ++cx) {
        if (tg.tile_map[tg.cell_index(cx, cy, cz)] == kEmptyTile) continue;
        const std::array<int, 3> cell{cx, cy, cz};
        for (std::size_t slot = 0; slot < tg.schema.write_slots.size(); ++slot) {
          const auto& ws = tg.schema.write_slots[slot];
          const int dir_sign = sign(lat.e[ws.dir][ws.axis]);
          bool any_reader = false;
          bool straight_reader = false;
          for_each_reader(ws.dir, ws.axis, cell, tg.schema.read_slots,
                          [&](std::array<int, 3> reader, const GhostSchema::ReadSlot& rs) {
                            if (!cell_nonempty(tg, reader)) return;
                            any_reader = true;
                            if (rs.axes_mask == (1u << ws.axis)) straight_reader = true;
                          });
          if (!any_reader) continue;
          std::array<int, 3> lower = cell;
          if (dir_sign < 0) lower[ws.axis] -= 1;
          const std::uint64_t key = buffer_key(tg, lower, ws.axis, ws.dir);
          const auto [it, inserted] =
              directory.emplace(key, static_cast<BufferIndex>(tg.buffer_count));
          if (inserted) {
            ++tg.buffer_count;
            tg.buffer_reduced.push_back(straight_reader ? 0 : 1);
          }
          tg.write_buffers[t * tg.schema.write_slots.size() + slot] = it->second;
        }
        ++t;
      }
    }
  }

  // Resolution pass: point every read slot at the buffer its source tile
  // writes; slots toward empty tiles or past a non-periodic edge stay absent.
  t = 0;
  for (int cz = 0; cz < tg.grid_dims[2]; ++cz) {
    for (int cy = 0; cy < tg.grid_dims[1]; ++cy) {
      for (int cx = 0; cx < tg.grid_dims[0]; ++cx) {
        if (tg.tile_map[tg.cell_index(cx, cy, cz)] == kEmptyTile) continue;
        for (std::size_t slot = 0; slot < tg.schema.read_slots.size(); ++slot) {
          const auto& rs = tg.schema.read_slots[slot];
          std::array<int, 3> src{cx + rs.src_offset[0], cy + rs.src_offset[1],
                                 cz + rs.src_offset[2]};
          std::array<int, 3> resolved;
          if (!resolve_cell(tg, src, resolved)) continue;
          if (tg.tile_map[tg.cell_index(resolved[0], resolved[1], resolved[2])] == kEmptyTile) {
            continue;
          }
          std::array<int, 3> lower = resolved;
          if (sign(lat.e[rs.dir][rs.carrier]) < 0) lower[rs.carrier] -= 1;
          const auto it = directory.find(buffer_key(tg, lower, rs.carrier, rs.dir));
          if (it != directory.end()) {
            tg.read_buffers[t * tg.schema.read_slots.size() + slot] = it->second;
          }
        }
        ++t;
      }
    }
  }
  return tg;
}

TileStats tile_stats(const TileGrid& tg) {
  TileStats st;
  st.n_tiles = tg.tile_count();
  st.n_ftiles = tg.fluid_tile_count();
  if (st.n_ftiles == 0) return st;

  std::size_t fluid_nodes = 0;
  for (const Tile& t : tg.tiles) fluid_nodes += t.fluid_count;
  st.phi_t = static_cast<double>(fluid_nodes) /
             (static_cast<double>(st.n_ftiles) * tg.n_tn);
  st.eta_t = 1.0 - st.phi_t;
  st.ratio_tiles = static_cast<double>(st.n_tiles) / static_cast<double>(st.n_ftiles);
  st.allocated_buffers = tg.buffer_count;

  std::size_t allocated_write_slots = 0;
  for (BufferIndex b : tg.write_buffers) allocated_write_slots += b != kAbsentBuffer;
  st.alpha_m = static_cast<double>(allocated_write_slots) /
               (static_cast<double>(st.n_ftiles) * tg.schema.write_slots.size());

  // Transferred-value ratio: full-buffer slots move n_tn/a values, corner
  // reads move a single value.
  double actual = static_cast<double>(allocated_write_slots) * tg.buf_len;
  double maximum = static_cast<double>(st.n_ftiles) *
                   (static_cast<double>(tg.schema.write_slots.size()) * tg.buf_len);
  for (std::size_t t = 0; t < st.n_ftiles; ++t) {
    for (std::size_t slot = 0; slot < tg.schema.read_slots.size(); ++slot) {
      const double weight = tg.schema.read_slots[slot].corner ? 1.0 : tg.buf_len;
      maximum += weight;
      if (tg.read_buffer(t, slot) != kAbsentBuffer) actual += weight;
    }
  }
  st.alpha_b = actual / maximum;

  std::size_t reduced = 0;
  for (std::uint8_t r : tg.buffer_reduced) reduced += r;
  st.reduced_buffer_fraction =
      tg.buffer_count == 0 ? 0.0 : static_cast<double>(reduced) / tg.buffer_count;
  return st;
}

}  // namespace splbm
