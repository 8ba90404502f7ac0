#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "splbm/geometry.hpp"
#include "splbm/lattice.hpp"

namespace splbm {

using TileIndex = std::uint32_t;
using BufferIndex = std::uint32_t;

inline constexpr TileIndex kEmptyTile = std::numeric_limits<TileIndex>::max();
inline constexpr BufferIndex kAbsentBuffer = std::numeric_limits<BufferIndex>::max();

struct Periodicity {
  bool x = false;
  bool y = false;
  bool z = false;
  bool axis(int k) const { return k == 0 ? x : (k == 1 ? y : z); }
};

/// Per-tile ghost-buffer slot layout for one lattice arrangement. A buffer
/// slot is identified by the direction it carries and, for writes, by the
/// tile face it crosses; reads are additionally split by the set of crossed
/// axes so that shifted edge/corner reads resolve to distinct source tiles.
struct GhostSchema {
  struct WriteSlot {
    int dir;   // lattice direction carried by the buffer
    int axis;  // face axis the values cross
  };
  struct ReadSlot {
    int dir;
    unsigned axes_mask;             // set of crossed axes (bit k = axis k)
    int carrier;                    // highest crossed axis: face buffer axis
    bool corner;                    // single-value read (all d axes crossed)
    std::array<int, 3> src_offset;  // source tile cell relative to the reader
  };

  std::vector<WriteSlot> write_slots;  // q_s + 2 q_d + 3 q_t entries
  std::vector<ReadSlot> read_slots;    // q_s + 3 q_d + 7 q_t entries
  int corner_reads = 0;                // q_d in 2D, q_t in 3D
};

GhostSchema make_ghost_schema(const LatticeDescriptor& lat);

struct Tile {
  std::array<int, 3> origin;    // node coordinates of the tile corner
  std::vector<NodeType> types;  // n_tn entries, x fastest; padding is Solid
  std::uint32_t fluid_count;    // non-solid nodes
};

/// Sparse tile cover of a geometry: a uniform mesh of a^d-node tiles starting
/// at node (0,0), with all-solid tiles removed, plus the ghost-buffer
/// topology used by the TGB stepping scheme.
struct TileGrid {
  int a = 0;
  int d = 0;
  int n_tn = 0;    // nodes per tile
  int buf_len = 0; // values per ghost buffer: n_tn / a
  const LatticeDescriptor* lat = nullptr;
  Periodicity periodic;

  std::array<int, 3> geo_dims{};
  std::array<int, 3> padded_dims{};
  std::array<int, 3> grid_dims{};  // tiles per axis

  std::vector<TileIndex> tile_map;  // grid cells; kEmptyTile for removed tiles
  std::vector<Tile> tiles;

  GhostSchema schema;
  std::vector<BufferIndex> write_buffers;  // tiles x write_slots
  std::vector<BufferIndex> read_buffers;   // tiles x read_slots
  std::size_t buffer_count = 0;
  std::vector<std::uint8_t> buffer_reduced;  // allocated only for a corner/edge pass

  std::size_t cell_count() const {
    return static_cast<std::size_t>(grid_dims[0]) * grid_dims[1] * grid_dims[2];
  }
  std::size_t cell_index(int cx, int cy, int cz) const {
    return static_cast<std::size_t>(cx) +
           static_cast<std::size_t>(grid_dims[0]) *
               (static_cast<std::size_t>(cy) + static_cast<std::size_t>(grid_dims[1]) * cz);
  }
  std::size_t tile_count() const { return cell_count(); }
  std::size_t fluid_tile_count() const { return tiles.size(); }

  /// Tile index at a cell, honoring per-axis wrap; kEmptyTile outside a
  /// non-periodic edge or where the tile was removed.
  TileIndex tile_at(int cx, int cy, int cz) const {
    int c[3] = {cx, cy, cz};
    for (int k = 0; k < 3; ++k) {
      if (c[k] < 0 || c[k] >= grid_dims[k]) {
        if (!periodic.axis(k)) return kEmptyTile;
        c[k] = ((c[k] % grid_dims[k]) + grid_dims[k]) % grid_dims[k];
      }
    }
    return tile_map[cell_index(c[0], c[1], c[2])];
  }

  BufferIndex write_buffer(std::size_t tile, std::size_t slot) const {
    return write_buffers[tile * schema.write_slots.size() + slot];
  }
  BufferIndex read_buffer(std::size_t tile, std::size_t slot) const {
    return read_buffers[tile * schema.read_slots.size() + slot];
  }
  std::size_t node_offset(int lx, int ly, int lz) const {
    return static_cast<std::size_t>(lx) +
           static_cast<std::size_t>(a) * (static_cast<std::size_t>(ly) +
                                          static_cast<std::size_t>(a) * lz);
  }
};

/// Covers the geometry with a-node tiles (padding with solid nodes) and
/// removes all-solid tiles. Ghost buffers are allocated between non-empty
/// tiles, including the full-size buffers whose only use is a corner or edge
/// passage toward a diagonal neighbor. Throws ConfigError for a < 2, for a
/// lattice/geometry dimension mismatch, and for periodic axes whose extent is
/// not a multiple of a.
TileGrid build_tile_grid(const Geometry& g, int a, const LatticeDescriptor& lat,
                         Periodicity periodic = {});

struct TileStats {
  double phi_t = 0.0;
  double eta_t = 0.0;
  double alpha_m = 0.0;
  double alpha_b = 0.0;
  double ratio_tiles = 0.0;              // N_tiles / N_ftiles
  double reduced_buffer_fraction = 0.0;  // share of reduced-use buffers
  std::size_t n_tiles = 0;
  std::size_t n_ftiles = 0;
  std::size_t allocated_buffers = 0;
};

TileStats tile_stats(const TileGrid& tg);

}  // namespace splbm
