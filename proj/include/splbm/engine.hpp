#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <memory>
#include <utility>

#include "splbm/collision.hpp"
#include "splbm/fields.hpp"
#include "splbm/geometry.hpp"
#include "splbm/thread_pool.hpp"
#include "splbm/tiling.hpp"

namespace splbm {

enum class Method { Dense, T2C, TGB };

using NodeInit = std::function<std::pair<double, Eigen::Vector3d>(int, int, int)>;
using SnapshotSink =
    std::function<void(long step, const FieldData&, std::array<int, 3> padded_dims)>;

/// Boundary processing, applied in place of collision. VelocityBC imposes the
/// prescribed velocity at the locally arriving density; PressureBC imposes
/// the prescribed density at the locally arriving velocity. The arriving
/// density is underdetermined at nodes whose upstream neighbors are solid or
/// outside the domain (their slots carry reflections, which would let the
/// density sag freely); those impose unit density instead.
template <class T>
Moments<T> apply_boundary(const LatticeDescriptor& lat, const FluidModel& model,
                          const BcParams& bc, NodeType type, std::span<T> f,
                          bool rho_underdetermined = true) {
  if (type == NodeType::VelocityBC) {
    T rho = T(1);
    if (!rho_underdetermined) {
      rho = T(0);
      for (int i = 0; i < lat.q; ++i) rho += f[i];
      if (!(rho > T(0)) || !std::isfinite(static_cast<double>(rho))) rho = T(1);
    }
    const Vec3<T> u = bc.velocity.template cast<T>();
    equilibrium<T>(lat, model, rho, u, f);
    return {rho, u};
  }
  // PressureBC: velocity extrapolated from the current moments.
  T rho = T(0);
  Vec3<T> m = Vec3<T>::Zero();
  for (int i = 0; i < lat.q; ++i) {
    rho += f[i];
    m[0] += T(lat.e[i][0]) * f[i];
    m[1] += T(lat.e[i][1]) * f[i];
    m[2] += T(lat.e[i][2]) * f[i];
  }
  Vec3<T> u = Vec3<T>::Zero();
  if (model.compressibility == Compressibility::QuasiCompressible) {
    if (rho > T(0)) u = m / rho;
  } else {
    u = m;
  }
  const T rho_bc = T(bc.density);
  equilibrium<T>(lat, model, rho_bc, u, f);
  return {rho_bc, u};
}

template <class T>
class Engine {
 public:
  virtual ~Engine() = default;

  void initialize_uniform(double rho0 = 1.0,
                          const Eigen::Vector3d& u0 = Eigen::Vector3d::Zero()) {
    initialize([rho0, u0](int, int, int) { return std::make_pair(rho0, u0); });
  }
  virtual void initialize(const NodeInit& init) = 0;

  /// Advances one iteration; false when a non-finite moment appeared.
  virtual bool step() = 0;

  /// Moments of the current post-collision state, the common observable of
  /// all three stepping schemes.
  virtual FieldData fields() const = 0;

  virtual std::array<int, 3> padded_dims() const = 0;
  virtual std::uint64_t tile_visits() const = 0;

  long current_step() const { return step_count_; }

 protected:
  long step_count_ = 0;
};

namespace detail {

template <class T>
bool finite_moments(const Moments<T>& m) {
  return std::isfinite(static_cast<double>(m.rho)) &&
         std::isfinite(static_cast<double>(m.u[0])) &&
         std::isfinite(static_cast<double>(m.u[1])) &&
         std::isfinite(static_cast<double>(m.u[2]));
}

inline const LatticeDescriptor& solver_lattice(int d) {
  return lattice_descriptor(d == 2 ? Arrangement::D2Q9 : Arrangement::D3Q19);
}

// Marks boundary nodes whose arriving density is degenerate: at least one
// upstream neighbor is solid or lies outside the domain.
inline std::vector<std::uint8_t> degenerate_bc_mask(const Geometry& g,
                                                    const LatticeDescriptor& lat,
                                                    Periodicity per) {
  std::vector<std::uint8_t> mask(g.node_count(), 0);
  for (int z = 0; z < g.dims[2]; ++z) {
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int x = 0; x < g.dims[0]; ++x) {
        const NodeType t = g.at(x, y, z);
        if (t != NodeType::VelocityBC && t != NodeType::PressureBC) continue;
        bool degenerate = false;
        for (int i = 1; i < lat.q && !degenerate; ++i) {
          int s[3] = {x - lat.e[i][0], y - lat.e[i][1], z - lat.e[i][2]};
          bool outside = false;
          for (int k = 0; k < 3; ++k) {
            if (s[k] < 0 || s[k] >= g.dims[k]) {
              if (per.axis(k)) {
                s[k] = ((s[k] % g.dims[k]) + g.dims[k]) % g.dims[k];
              } else {
                outside = true;
                break;
              }
            }
          }
          degenerate = outside || is_solid(g.at(s[0], s[1], s[2]));
        }
        if (degenerate) mask[g.index(x, y, z)] = 1;
      }
    }
  }
  return mask;
}

}  // namespace detail

/// Two-array reference engine over the raw geometry; the correctness oracle
/// for the tile engines. Pull scheme: gather neighbors from the read copy
/// (half-way bounce-back at solid sources), collide, store to the write copy.
template <class T>
class DenseEngine : public Engine<T> {
 public:
  DenseEngine(const Geometry& g, const FluidModel& model, Periodicity periodic = {},
              ThreadPool* pool = nullptr)
      : lat_(detail::solver_lattice(g.d)),
        model_(model),
        op_(lat_, model),
        bc_(g.bc),
        periodic_(periodic),
        dims_(g.dims),
        d_(g.d),
        types_(g.types),
        bc_degenerate_(detail::degenerate_bc_mask(g, lat_, periodic)) {
    n_ = g.node_count();
    pdf_[0].assign(static_cast<std::size_t>(lat_.q) * n_, T(0));
    pdf_[1].assign(static_cast<std::size_t>(lat_.q) * n_, T(0));
    pool_ = pool;
  }

  void initialize(const NodeInit& init) override {
    T feq[32];
    for (int z = 0; z < dims_[2]; ++z) {
      for (int y = 0; y < dims_[1]; ++y) {
        for (int x = 0; x < dims_[0]; ++x) {
          const auto [rho, u] = init(x, y, z);
          equilibrium<T>(lat_, model_, T(rho), u.template cast<T>(), std::span<T>(feq, lat_.q));
          const std::size_t node = index(x, y, z);
          for (int i = 0; i < lat_.q; ++i) {
            pdf_[0][static_cast<std::size_t>(i) * n_ + node] = feq[i];
            pdf_[1][static_cast<std::size_t>(i) * n_ + node] = feq[i];
          }
        }
      }
    }
    read_ = 0;
    this->step_count_ = 0;
  }

  bool step() override {
    std::atomic<bool> ok{true};
    const T* read = pdf_[read_].data();
    T* write = pdf_[1 - read_].data();
    sweep(read, [&](std::size_t node, NodeType type, std::span<T> f) {
      const Moments<T> m =
          type == NodeType::Fluid
              ? op_(f)
              : apply_boundary<T>(lat_, model_, bc_, type, f, bc_degenerate_[node] != 0);
      if (!detail::finite_moments(m)) ok.store(false, std::memory_order_relaxed);
      for (int i = 0; i < lat_.q; ++i) write[static_cast<std::size_t>(i) * n_ + node] = f[i];
    });
    read_ = 1 - read_;
    ++this->step_count_;
    return ok.load();
  }

  FieldData fields() const override {
    FieldData out = empty_fields(d_, dims_, types_);
    const T* read = pdf_[read_].data();
    T f[32];
    for (std::size_t node = 0; node < n_; ++node) {
      if (is_solid(types_[node])) continue;
      for (int i = 0; i < lat_.q; ++i) f[i] = read[static_cast<std::size_t>(i) * n_ + node];
      store_moments(out, node, moments<T>(lat_, model_, std::span<const T>(f, lat_.q)));
    }
    return out;
  }

  std::array<int, 3> padded_dims() const override { return dims_; }
  std::uint64_t tile_visits() const override { return 0; }

 private:
  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_[0]) * (static_cast<std::size_t>(y) +
                                                 static_cast<std::size_t>(dims_[1]) * z);
  }

  // Gathers the propagated state of every non-solid node from `read` and
  // hands it to fn; rows are distributed over the pool.
  template <class Fn>
  void sweep(const T* read, Fn&& fn) const {
    const std::size_t rows = static_cast<std::size_t>(dims_[1]) * dims_[2];
    auto body = [&](std::size_t row_begin, std::size_t row_end, int) {
      T fin[32];
      for (std::size_t row = row_begin; row < row_end; ++row) {
        const int y = static_cast<int>(row % dims_[1]);
        const int z = static_cast<int>(row / dims_[1]);
        for (int x = 0; x < dims_[0]; ++x) {
          const std::size_t node = index(x, y, z);
          const NodeType type = types_[node];
          if (is_solid(type)) continue;
          for (int i = 0; i < lat_.q; ++i) {
            int s[3] = {x - lat_.e[i][0], y - lat_.e[i][1], z - lat_.e[i][2]};
            bool outside = false;
            for (int k = 0; k < 3; ++k) {
              if (s[k] < 0 || s[k] >= dims_[k]) {
                if (periodic_.axis(k)) {
                  s[k] = ((s[k] % dims_[k]) + dims_[k]) % dims_[k];
                } else {
                  outside = true;
                  break;
                }
              }
            }
            if (outside) {
              fin[i] = read[static_cast<std::size_t>(lat_.opposite[i]) * n_ + node];
              continue;
            }
            const std::size_t src = index(s[0], s[1], s[2]);
            fin[i] = is_solid(types_[src])
                         ? read[static_cast<std::size_t>(lat_.opposite[i]) * n_ + node]
                         : read[static_cast<std::size_t>(i) * n_ + src];
          }
          fn(node, type, std::span<T>(fin, lat_.q));
        }
      }
    };
    if (pool_ != nullptr) {
      pool_->parallel_for(rows, body);
    } else {
      body(0, rows, 0);
    }
  }

  static FieldData empty_fields(int d, std::array<int, 3> dims,
                                const std::vector<NodeType>& types) {
    FieldData out;
    out.d = d;
    out.dims = dims;
    const std::size_t n = types.size();
    out.mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) out.mask[i] = !is_solid(types[i]);
    out.rho.assign(n, 0.0);
    out.ux.assign(n, 0.0);
    out.uy.assign(n, 0.0);
    out.uz.assign(n, 0.0);
    return out;
  }

  static void store_moments(FieldData& out, std::size_t node, const Moments<T>& m) {
    out.rho[node] = static_cast<double>(m.rho);
    out.ux[node] = static_cast<double>(m.u[0]);
    out.uy[node] = static_cast<double>(m.u[1]);
    out.uz[node] = static_cast<double>(m.u[2]);
  }

  const LatticeDescriptor& lat_;
  FluidModel model_;
  CollisionOperator<T> op_;
  BcParams bc_;
  Periodicity periodic_;
  std::array<int, 3> dims_;
  int d_;
  std::vector<NodeType> types_;
  std::vector<std::uint8_t> bc_degenerate_;
  std::size_t n_ = 0;
  std::vector<T> pdf_[2];
  int read_ = 0;
  ThreadPool* pool_ = nullptr;
};

/// Tiles with two PDF copies: gather propagation across tiles through the
/// tile map, all stores within the own tile, copies swapped per step.
template <class T>
class TileEngineT2C : public Engine<T> {
 public:
  TileEngineT2C(const Geometry& g, int a, const FluidModel& model,
                Periodicity periodic = {}, ThreadPool* pool = nullptr)
      : lat_(detail::solver_lattice(g.d)),
        model_(model),
        op_(lat_, model),
        bc_(g.bc),
        tg_(build_tile_grid(g, a, lat_, periodic)),
        bc_degenerate_(detail::degenerate_bc_mask(g, lat_, periodic)),
        pool_(pool) {
    n_tn_ = static_cast<std::size_t>(tg_.n_tn);
    const std::size_t total = tg_.tiles.size() * static_cast<std::size_t>(lat_.q) * n_tn_;
    pdf_[0].assign(total, T(0));
    pdf_[1].assign(total, T(0));
    // Node types of all tiles in one block, so neighbor lookups stay on a
    // single array in the gather loop.
    types_.reserve(tg_.tiles.size() * n_tn_);
    for (const Tile& tile : tg_.tiles) {
      types_.insert(types_.end(), tile.types.begin(), tile.types.end());
    }
    build_neighbor_tables();
  }

  void initialize(const NodeInit& init) override {
    T feq[32];
    for (std::size_t t = 0; t < tg_.tiles.size(); ++t) {
      const Tile& tile = tg_.tiles[t];
      for (std::size_t p = 0; p < n_tn_; ++p) {
        const auto [x, y, z] = node_coords(tile, p);
        const auto [rho, u] = init(x, y, z);
        equilibrium<T>(lat_, model_, T(rho), u.template cast<T>(), std::span<T>(feq, lat_.q));
        for (int i = 0; i < lat_.q; ++i) {
          pdf_[0][slot(t, i, p)] = feq[i];
          pdf_[1][slot(t, i, p)] = feq[i];
        }
      }
    }
    read_ = 0;
    this->step_count_ = 0;
  }

  bool step() override {
    std::atomic<bool> ok{true};
    const T* read = pdf_[read_].data();
    T* write = pdf_[1 - read_].data();
    sweep(read, &visits_, [&](std::size_t t, std::size_t p, NodeType type, std::span<T> f) {
      const Moments<T> m = type == NodeType::Fluid
                               ? op_(f)
                               : apply_boundary<T>(lat_, model_, bc_, type, f,
                                                   bc_degenerate(t, p));
      if (!detail::finite_moments(m)) ok.store(false, std::memory_order_relaxed);
      for (int i = 0; i < lat_.q; ++i) write[slot(t, i, p)] = f[i];
    });
    read_ = 1 - read_;
    ++this->step_count_;
    return ok.load();
  }

  FieldData fields() const override {
    FieldData out = make_field_frame();
    const T* read = pdf_[read_].data();
    T f[32];
    for (std::size_t t = 0; t < tg_.tiles.size(); ++t) {
      const Tile& tile = tg_.tiles[t];
      for (std::size_t p = 0; p < n_tn_; ++p) {
        if (is_solid(tile.types[p])) continue;
        for (int i = 0; i < lat_.q; ++i) f[i] = read[slot(t, i, p)];
        const Moments<T> m = moments<T>(lat_, model_, std::span<const T>(f, lat_.q));
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

  void build_neighbor_tables() {
    const int a = tg_.a;
    delta_.assign(static_cast<std::size_t>(lat_.q) * n_tn_, 13);
    src_.assign(static_cast<std::size_t>(lat_.q) * n_tn_, 0);
    for (int i = 0; i < lat_.q; ++i) {
      for (std::size_t p = 0; p < n_tn_; ++p) {
        int l[3] = {static_cast<int>(p % a), static_cast<int>((p / a) % a),
                    static_cast<int>(p / (static_cast<std::size_t>(a) * a))};
        int dcell[3] = {0, 0, 0};
        for (int k = 0; k < 3; ++k) {
          l[k] -= lat_.e[i][k];
          const int extent = (k == 2 && tg_.d == 2) ? 1 : a;
          if (l[k] < 0) {
            dcell[k] = -1;
            l[k] += extent;
          } else if (l[k] >= extent) {
            dcell[k] = 1;
            l[k] -= extent;
          }
        }
        delta_[static_cast<std::size_t>(i) * n_tn_ + p] =
            static_cast<std::uint8_t>((dcell[0] + 1) + 3 * ((dcell[1] + 1) + 3 * (dcell[2] + 1)));
        src_[static_cast<std::size_t>(i) * n_tn_ + p] =
            static_cast<std::uint32_t>(tg_.node_offset(l[0], l[1], l[2]));
      }
    }
    // 3^d neighborhood of tile-map cells per tile.
    nb_.assign(tg_.tiles.size() * 27, kEmptyTile);
    for (int cz = 0; cz < tg_.grid_dims[2]; ++cz) {
      for (int cy = 0; cy < tg_.grid_dims[1]; ++cy) {
        for (int cx = 0; cx < tg_.grid_dims[0]; ++cx) {
          const TileIndex t = tg_.tile_map[tg_.cell_index(cx, cy, cz)];
          if (t == kEmptyTile) continue;
          for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                const int idx = (dx + 1) + 3 * ((dy + 1) + 3 * (dz + 1));
                nb_[static_cast<std::size_t>(t) * 27 + idx] =
                    tg_.tile_at(cx + dx, cy + dy, cz + dz);
              }
            }
          }
        }
      }
    }
  }

  template <class Fn>
  void sweep(const T* read, std::atomic<std::uint64_t>* visit_counter, Fn&& fn) const {
    auto body = [&](std::size_t t_begin, std::size_t t_end, int) {
      T fin[32];
      const NodeType* types = types_.data();
      const T* pdf_bases[27];
      const NodeType* type_bases[27];
      for (std::size_t t = t_begin; t < t_end; ++t) {
        const NodeType* own = types + t * n_tn_;
        const T* own_pdf = read + slot(t, 0, 0);
        const TileIndex* nb = nb_.data() + t * 27;
        for (int d = 0; d < 27; ++d) {
          const TileIndex s = nb[d];
          pdf_bases[d] = s == kEmptyTile ? nullptr : read + slot(s, 0, 0);
          type_bases[d] = s == kEmptyTile ? nullptr : types + s * n_tn_;
        }
        for (std::size_t p = 0; p < n_tn_; ++p) {
          const NodeType type = own[p];
          if (is_solid(type)) continue;
          for (int i = 0; i < lat_.q; ++i) {
            const std::size_t entry = static_cast<std::size_t>(i) * n_tn_ + p;
            const std::uint8_t delta = delta_[entry];
            const std::size_t sp = src_[entry];
            const T* src_pdf;
            bool blocked;
            if (delta == 13) {
              src_pdf = own_pdf;
              blocked = is_solid(own[sp]);
            } else {
              src_pdf = pdf_bases[delta];
              blocked = src_pdf == nullptr || is_solid(type_bases[delta][sp]);
            }
            fin[i] = blocked
                         ? own_pdf[static_cast<std::size_t>(lat_.opposite[i]) * n_tn_ + p]
                         : src_pdf[static_cast<std::size_t>(i) * n_tn_ + sp];
          }
          fn(t, p, type, std::span<T>(fin, lat_.q));
        }
      }
      if (visit_counter != nullptr) {
        visit_counter->fetch_add(t_end - t_begin, std::memory_order_relaxed);
      }
    };
    if (pool_ != nullptr) {
      pool_->parallel_for(tg_.tiles.size(), body);
    } else {
      body(0, tg_.tiles.size(), 0);
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
  std::vector<T> pdf_[2];
  std::vector<NodeType> types_;  // tiles x n_tn, contiguous
  int read_ = 0;
  std::vector<std::uint8_t> delta_;
  std::vector<std::uint32_t> src_;
  std::vector<TileIndex> nb_;
  mutable std::atomic<std::uint64_t> visits_{0};
};

template <class T>
class TileEngineTGB;

}  // namespace splbm

#include "splbm/engine_tgb.hpp"

namespace splbm {

struct SimConfig {
  Method method = Method::T2C;
  int tile = 0;  // 0 selects 16 for 2D, 4 for 3D
  long steps = 0;
  long snapshot_every = 0;
  int threads = 1;
  Periodicity periodic;
  FluidModel model;
  double initial_density = 1.0;
  Eigen::Vector3d initial_velocity = Eigen::Vector3d::Zero();
  NodeInit init;            // overrides the uniform initial state when set
  SnapshotSink snapshot_sink;

  int tile_edge(int d) const { return tile > 0 ? tile : (d == 2 ? 16 : 4); }
};

struct SimulationResult {
  long steps = 0;
  double wall_seconds = 0.0;
  double mlups = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double mass_drift_rel = 0.0;
  std::uint64_t tile_visits = 0;
  std::size_t fluid_nodes = 0;
  std::size_t fluid_tiles = 0;
  int snapshots_written = 0;
  std::array<int, 3> padded_dims{0, 0, 1};
  FieldData fields;
};

template <class T>
std::unique_ptr<Engine<T>> make_engine(const Geometry& g, const SimConfig& cfg,
                                       ThreadPool* pool) {
  switch (cfg.method) {
    case Method::Dense:
      return std::make_unique<DenseEngine<T>>(g, cfg.model, cfg.periodic, pool);
    case Method::T2C:
      return std::make_unique<TileEngineT2C<T>>(g, cfg.tile_edge(g.d), cfg.model,
                                                cfg.periodic, pool);
    case Method::TGB:
      return std::make_unique<TileEngineTGB<T>>(g, cfg.tile_edge(g.d), cfg.model,
                                                cfg.periodic, pool);
  }
  throw ConfigError("unknown method");
}

template <class T>
SimulationResult run_simulation(const Geometry& g, const SimConfig& cfg) {
  if (cfg.steps < 0) throw ConfigError("steps must be non-negative");
  ThreadPool pool(cfg.threads);
  auto engine = make_engine<T>(g, cfg, &pool);
  if (cfg.init) {
    engine->initialize(cfg.init);
  } else {
    engine->initialize_uniform(cfg.initial_density, cfg.initial_velocity);
  }

  SimulationResult res;
  res.fluid_nodes = g.fluid_count();
  res.padded_dims = engine->padded_dims();
  {
    FieldData f0 = engine->fields();
    res.mass_initial = f0.total_mass();
    if (cfg.steps == 0) res.fields = std::move(f0);
  }

  double wall = 0.0;
  for (long s = 1; s <= cfg.steps; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool ok = engine->step();
    wall += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!ok) throw NumericalError("non-finite density or velocity", s);
    if (cfg.snapshot_every > 0 && s % cfg.snapshot_every == 0 && cfg.snapshot_sink) {
      cfg.snapshot_sink(s, engine->fields(), engine->padded_dims());
      ++res.snapshots_written;
    }
  }

  res.steps = cfg.steps;
  res.wall_seconds = wall;
  res.mlups = (cfg.steps > 0 && wall > 0.0)
                  ? static_cast<double>(res.fluid_nodes) * static_cast<double>(cfg.steps) /
                        (wall * 1e6)
                  : 0.0;
  if (cfg.steps > 0) res.fields = engine->fields();
  res.mass_final = res.fields.total_mass();
  res.mass_drift_rel = res.mass_initial != 0.0
                           ? std::abs(res.mass_final - res.mass_initial) /
                                 std::abs(res.mass_initial)
                           : 0.0;
  res.tile_visits = engine->tile_visits();
  return res;
}

}  // namespace splbm
