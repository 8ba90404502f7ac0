#pragma once

// Internal split of engine.hpp: the ghost-buffer stepping scheme.

#include <cassert>

#include "splbm/engine.hpp"

namespace splbm {

/// Tiles with ghost buffers: one PDF copy plus double-buffered edge buffers.
/// Propagation is split in two: values leaving a tile are written unshifted
/// into the write ghost set and picked up by the neighbor with a shifted read
/// at the start of the next step; values staying inside the tile are
/// scattered directly. Values whose upstream neighbor is solid or missing are
/// covered by a bounce-back store into the own slot, which an arriving ghost
/// value overwrites and an arriving NaN sentinel leaves in place.
template <class T>
class TileEngineTGB : public Engine<T> {
 public:
  TileEngineTGB(const Geometry& g, int a, const FluidModel& model,
                Periodicity periodic = {}, ThreadPool* pool = nullptr)
      : lat_(detail::solver_lattice(g.d)),
        model_(model),
        op_(lat_, model),
        bc_(g.bc),
        tg_(build_tile_grid(g, a, lat_, periodic)),
        bc_degenerate_(detail::degenerate_bc_mask(g, lat_, periodic)),
        pool_(pool) {
    n_tn_ = static_cast<std::size_t>(tg_.n_tn);
    pdf_.assign(tg_.tiles.size() * static_cast<std::size_t>(lat_.q) * n_tn_, T(0));
    ghosts_[0].assign(tg_.buffer_count * static_cast<std::size_t>(tg_.buf_len), nan());
    ghosts_[1].assign(tg_.buffer_count * static_cast<std::size_t>(tg_.buf_len), nan());
    build_plans();
    const int workers = pool_ != nullptr ? pool_->size() : 1;
    scratch_.resize(static_cast<std::size_t>(workers));
    for (auto& s : scratch_) s.assign(static_cast<std::size_t>(lat_.q) * n_tn_, T(0));
  }

  void initialize(const NodeInit& init) override {
    // The between-step representation is scattered: each slot holds the value
    // arriving from its upstream neighbor. Seed it by scattering the initial
    // state and priming the read ghost set with an outflow pass.
    std::fill(pdf_.begin(), pdf_.end(), T(0));
    std::fill(ghosts_[0].begin(), ghosts_[0].end(), nan());
    std::fill(ghosts_[1].begin(), ghosts_[1].end(), nan());
    read_set_ = 0;
    this->step_count_ = 0;
    T feq[32];
    std::vector<T> fl_store(static_cast<std::size_t>(lat_.q) * n_tn_, T(0));
    T* fl = fl_store.data();
    for (std::size_t t = 0; t < tg_.tiles.size(); ++t) {
      const Tile& tile = tg_.tiles[t];
      for (std::size_t p = 0; p < n_tn_; ++p) {
        const auto [x, y, z] = node_coords(tile, p);
        const auto [rho, u] = init(x, y, z);
        equilibrium<T>(lat_, model_, T(rho), u.template cast<T>(), std::span<T>(feq, lat_.q));
        for (int i = 0; i < lat_.q; ++i) fl[static_cast<std::size_t>(i) * n_tn_ + p] = feq[i];
      }
      outflow_tile(t, fl, read_set_);
      scatter_tile(t, fl);
    }
  }

  bool step() override {
    std::atomic<bool> ok{true};
    auto body = [&](std::size_t t_begin, std::size_t t_end, int worker) {
      T* fl = scratch_[static_cast<std::size_t>(worker)].data();
      for (std::size_t t = t_begin; t < t_end; ++t) {
        step_tile(t, fl, ok);
      }
      visits_.fetch_add(t_end - t_begin, std::memory_order_relaxed);
    };
    if (pool_ != nullptr) {
      pool_->parallel_for(tg_.tiles.size(), body);
    } else {
      body(0, tg_.tiles.size(), 0);
    }
    read_set_ = 1 - read_set_;
    ++this->step_count_;
    return ok.load();
  }

  FieldData fields() const override {
    // Undo the scatter: the post-collision value a node emitted along i sits
    // in the downstream slot inside the own tile, or in the own opposite slot
    // when the move left the tile or hit a solid node.
    FieldData out = make_field_frame();
    T fout[32];
    for (std::size_t t = 0; t < tg_.tiles.size(); ++t) {
      const Tile& tile = tg_.tiles[t];
      const T* base = pdf_.data() + slot(t, 0, 0);
      for (std::size_t p = 0; p < n_tn_; ++p) {
        if (is_solid(tile.types[p])) continue;
        for (int i = 0; i < lat_.q; ++i) {
          const std::int32_t tgt = scatter_[static_cast<std::size_t>(i) * n_tn_ + p];
          if (tgt >= 0 && !is_solid(tile.types[static_cast<std::size_t>(tgt)])) {
            fout[i] = base[static_cast<std::size_t>(i) * n_tn_ + static_cast<std::size_t>(tgt)];
          } else {
            fout[i] = base[static_cast<std::size_t>(lat_.opposite[i]) * n_tn_ + p];
          }
        }
        const Moments<T> m = moments<T>(lat_, model_, std::span<const T>(fout, lat_.q));
        const auto [x, y, z] = node_coords(tile, p);
        const std::size_t node = out.index(x, y, z);
        out.rho[node] = static_cast<double>(m.rho);
        out.ux[node] = static_cast<double>(m.u[0]);
        out.uy[node] = static_cast<double>(m.u[1]);
        out.uz[node] = static_cast<double>(m.u[2]);
      }
    }
    return out;
  }

  std::array<int, 3> padded_dims() const override { return tg_.padded_dims; }
  std::uint64_t tile_visits() const override { return visits_.load(); }
  const TileGrid& tile_grid() const { return tg_; }

 private:
  static T nan() { return std::numeric_limits<T>::quiet_NaN(); }

  std::size_t slot(std::size_t t, int i, std::size_t p) const {
    return (t * static_cast<std::size_t>(lat_.q) + static_cast<std::size_t>(i)) * n_tn_ + p;
  }

  std::tuple<int, int, int> node_coords(const Tile& tile, std::size_t p) const {
    const int a = tg_.a;
    const int lx = static_cast<int>(p % a);
    const int ly = static_cast<int>((p / a) % a);
    const int lz = static_cast<int>(p / (static_cast<std::size_t>(a) * a));
    return {tile.origin[0] + lx, tile.origin[1] + ly, tile.origin[2] + lz};
  }

  bool bc_degenerate(std::size_t t, std::size_t p) const {
    const auto [x, y, z] = node_coords(tg_.tiles[t], p);
    const std::size_t node =
        static_cast<std::size_t>(x) +
        static_cast<std::size_t>(tg_.geo_dims[0]) *
            (static_cast<std::size_t>(y) +
             static_cast<std::size_t>(tg_.geo_dims[1]) * static_cast<std::size_t>(z));
    return bc_degenerate_[node] != 0;
  }

  const T* ghost(int set, BufferIndex b) const {
    return ghosts_[set].data() + static_cast<std::size_t>(b) * tg_.buf_len;
  }
  T* ghost(int set, BufferIndex b) {
    return ghosts_[set].data() + static_cast<std::size_t>(b) * tg_.buf_len;
  }

  // Buffer value position of a node on the face with the given axis: the
  // remaining coordinates, x fastest.
  std::uint32_t face_pos(int axis, const int l[3]) const {
    int coords[2];
    int n = 0;
    for (int k = 0; k < 3; ++k) {
      if (k == axis || (k == 2 && tg_.d == 2)) continue;
      coords[n++] = l[k];
    }
    return n == 1 ? static_cast<std::uint32_t>(coords[0])
                  : static_cast<std::uint32_t>(coords[0] + tg_.a * coords[1]);
  }

  void build_plans() {
    const int a = tg_.a;
    const auto& schema = tg_.schema;

    outflow_.resize(schema.write_slots.size());
    for (std::size_t s = 0; s < schema.write_slots.size(); ++s) {
      const auto& ws = schema.write_slots[s];
      const int exit = lat_.e[ws.dir][ws.axis] > 0 ? a - 1 : 0;
      int lo[3] = {0, 0, 0};
      int hi[3] = {a - 1, a - 1, tg_.d == 3 ? a - 1 : 0};
      lo[ws.axis] = hi[ws.axis] = exit;
      for (int lz = lo[2]; lz <= hi[2]; ++lz) {
        for (int ly = lo[1]; ly <= hi[1]; ++ly) {
          for (int lx = lo[0]; lx <= hi[0]; ++lx) {
            const int l[3] = {lx, ly, lz};
            outflow_[s].push_back({static_cast<std::uint32_t>(tg_.node_offset(lx, ly, lz)),
                                   face_pos(ws.axis, l)});
          }
        }
      }
    }

    intake_.resize(schema.read_slots.size());
    for (std::size_t s = 0; s < schema.read_slots.size(); ++s) {
      const auto& rs = schema.read_slots[s];
      int lo[3] = {0, 0, 0};
      int hi[3] = {a - 1, a - 1, tg_.d == 3 ? a - 1 : 0};
      for (int k = 0; k < tg_.d; ++k) {
        const int e = lat_.e[rs.dir][k];
        if (rs.axes_mask & (1u << k)) {
          lo[k] = hi[k] = e > 0 ? 0 : a - 1;  // entry face of the reader
        } else if (e > 0) {
          lo[k] = 1;
        } else if (e < 0) {
          hi[k] = a - 2;
        }
      }
      for (int lz = lo[2]; lz <= hi[2]; ++lz) {
        for (int ly = lo[1]; ly <= hi[1]; ++ly) {
          for (int lx = lo[0]; lx <= hi[0]; ++lx) {
            const int dest[3] = {lx, ly, lz};
            int src[3];
            for (int k = 0; k < 3; ++k) {
              const int e = lat_.e[rs.dir][k];
              if (rs.axes_mask & (1u << k)) {
                src[k] = e > 0 ? a - 1 : 0;  // exit face of the source tile
              } else {
                src[k] = dest[k] - e;  // shifted read
              }
            }
            intake_[s].push_back(
                {static_cast<std::uint32_t>(tg_.node_offset(lx, ly, lz)),
                 face_pos(rs.carrier, src)});
          }
        }
      }
    }

    // Scatter targets inside the own tile; -1 marks a tile-crossing move
    // whose value travels through a ghost buffer instead.
    scatter_.assign(static_cast<std::size_t>(lat_.q) * n_tn_, -1);
    for (int i = 0; i < lat_.q; ++i) {
      for (std::size_t p = 0; p < n_tn_; ++p) {
        int l[3] = {static_cast<int>(p % a), static_cast<int>((p / a) % a),
                    static_cast<int>(p / (static_cast<std::size_t>(a) * a))};
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
          l[k] += lat_.e[i][k];
          const int extent = (k == 2 && tg_.d == 2) ? 1 : a;
          if (l[k] < 0 || l[k] >= extent) inside = false;
        }
        if (inside) {
          scatter_[static_cast<std::size_t>(i) * n_tn_ + p] =
              static_cast<std::int32_t>(tg_.node_offset(l[0], l[1], l[2]));
        }
      }
    }
  }

  // Completes the previous step's propagation for one tile: local PDF block
  // merged with the non-NaN values arriving through the read ghost set.
  void load_with_intake(std::size_t t, T* fl) const {
    const T* base = pdf_.data() + slot(t, 0, 0);
    std::memcpy(fl, base, sizeof(T) * static_cast<std::size_t>(lat_.q) * n_tn_);
    const Tile& tile = tg_.tiles[t];
    const auto& schema = tg_.schema;
    for (std::size_t s = 0; s < schema.read_slots.size(); ++s) {
      const BufferIndex b = tg_.read_buffer(t, s);
      if (b == kAbsentBuffer) continue;
      const T* src = ghost(read_set_, b);
      const std::size_t i = static_cast<std::size_t>(schema.read_slots[s].dir);
      for (const auto& [dest_p, fpos] : intake_[s]) {
        const T v = src[fpos];
        if (!std::isnan(static_cast<double>(v)) && !is_solid(tile.types[dest_p])) {
          fl[i * n_tn_ + dest_p] = v;
        }
      }
    }
  }

  void step_tile(std::size_t t, T* fl, std::atomic<bool>& ok) {
    const Tile& tile = tg_.tiles[t];

    load_with_intake(t, fl);

#ifndef NDEBUG
    // The sentinel must never leak into a non-solid node's slots: every such
    // slot is either scattered to, fallback-stored, or replaced at intake.
    for (std::size_t p = 0; p < n_tn_; ++p) {
      if (is_solid(tile.types[p])) continue;
      for (int i = 0; i < lat_.q; ++i) {
        assert(!std::isnan(static_cast<double>(fl[static_cast<std::size_t>(i) * n_tn_ + p])));
      }
    }
#endif

    // Boundary processing / collision, in place per node.
    T fin[32];
    for (std::size_t p = 0; p < n_tn_; ++p) {
      const NodeType type = tile.types[p];
      if (is_solid(type)) continue;
      for (int i = 0; i < lat_.q; ++i) fin[i] = fl[static_cast<std::size_t>(i) * n_tn_ + p];
      const Moments<T> m = type == NodeType::Fluid
                               ? op_(std::span<T>(fin, lat_.q))
                               : apply_boundary<T>(lat_, model_, bc_, type,
                                                   std::span<T>(fin, lat_.q),
                                                   bc_degenerate(t, p));
      if (!detail::finite_moments(m)) ok.store(false, std::memory_order_relaxed);
      for (int i = 0; i < lat_.q; ++i) fl[static_cast<std::size_t>(i) * n_tn_ + p] = fin[i];
    }

    outflow_tile(t, fl, 1 - read_set_);
    scatter_tile(t, fl);
  }

  // Outflow: post-collision edge values into the given ghost set, with the
  // sentinel standing in for solid sources.
  void outflow_tile(std::size_t t, const T* fl, int set) {
    const Tile& tile = tg_.tiles[t];
    const auto& schema = tg_.schema;
    for (std::size_t s = 0; s < schema.write_slots.size(); ++s) {
      const BufferIndex b = tg_.write_buffer(t, s);
      if (b == kAbsentBuffer) continue;
      T* dst = ghost(set, b);
      const std::size_t i = static_cast<std::size_t>(schema.write_slots[s].dir);
      for (const auto& [p, fpos] : outflow_[s]) {
        dst[fpos] = is_solid(tile.types[p]) ? nan() : fl[i * n_tn_ + p];
      }
    }
  }

  // Scatter within the tile. Moves that leave the tile or hit a solid node
  // store the bounce-back value into the own opposite slot; the next intake
  // replaces it when a real value arrives.
  void scatter_tile(std::size_t t, const T* fl) {
    const Tile& tile = tg_.tiles[t];
    T* base = pdf_.data() + slot(t, 0, 0);
    for (std::size_t p = 0; p < n_tn_; ++p) {
      if (is_solid(tile.types[p])) continue;
      for (int i = 0; i < lat_.q; ++i) {
        const T v = fl[static_cast<std::size_t>(i) * n_tn_ + p];
        const std::int32_t tgt = scatter_[static_cast<std::size_t>(i) * n_tn_ + p];
        if (tgt >= 0 && !is_solid(tile.types[static_cast<std::size_t>(tgt)])) {
          base[static_cast<std::size_t>(i) * n_tn_ + static_cast<std::size_t>(tgt)] = v;
        } else {
          base[static_cast<std::size_t>(lat_.opposite[i]) * n_tn_ + p] = v;
        }
      }
    }
  }

  FieldData make_field_frame() const {
    FieldData out;
    out.d = tg_.d;
    out.dims = tg_.geo_dims;
    const std::size_t n = static_cast<std::size_t>(out.dims[0]) * out.dims[1] * out.dims[2];
    out.mask.assign(n, 0);
    out.rho.assign(n, 0.0);
    out.ux.assign(n, 0.0);
    out.uy.assign(n, 0.0);
    out.uz.assign(n, 0.0);
    for (const Tile& tile : tg_.tiles) {
      for (std::size_t p = 0; p < n_tn_; ++p) {
        if (is_solid(tile.types[p])) continue;
        const auto [x, y, z] = node_coords(tile, p);
        out.mask[out.index(x, y, z)] = 1;
      }
    }
    return out;
  }

  const LatticeDescriptor& lat_;
  FluidModel model_;
  CollisionOperator<T> op_;
  BcParams bc_;
  TileGrid tg_;
  std::vector<std::uint8_t> bc_degenerate_;
  ThreadPool* pool_ = nullptr;
  std::size_t n_tn_ = 0;
  std::vector<T> pdf_;
  std::vector<T> ghosts_[2];
  int read_set_ = 0;
  std::vector<std::vector<std::array<std::uint32_t, 2>>> outflow_;  // (node, face pos)
  std::vector<std::vector<std::array<std::uint32_t, 2>>> intake_;   // (node, face pos)
  std::vector<std::int32_t> scatter_;
  std::vector<std::vector<T>> scratch_;
  mutable std::atomic<std::uint64_t> visits_{0};
};

}  // namespace splbm
