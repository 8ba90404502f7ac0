#pragma once

#include <optional>
#include <string>

#include "splbm/lattice.hpp"
#include "splbm/tiling.hpp"

namespace splbm {

/// Storage and transfer sizes the cost model is evaluated with. All sizes are
/// in bytes; they describe the accounting convention, not the in-memory
/// representation of this process.
struct CostParams {
  const LatticeDescriptor* lat = nullptr;
  double s_d = 8;       // bytes per f_i value (4 or 8)
  double s_t = 2;       // bytes per node type
  double s_ti = 4;      // tile map index
  double s_gbi = 4;     // ghost buffer index
  double s_idx_cm = 4;  // connectivity matrix index
  double s_idx_fia = 4; // fluid index array entry
  double s_b = 32;      // burst transaction size
  int a = 4;            // tile edge

  void validate() const;
};

/// Geometry-dependent inputs of the model, either measured from a TileGrid or
/// supplied manually to evaluate published cases.
struct GeometryStats {
  double phi = 1.0;
  double phi_t = 1.0;
  double alpha_m = 1.0;
  double alpha_b = 1.0;
  double ratio_tiles = 1.0;      // N_tiles / N_ftiles
  bool alpha_b_estimated = false;

  /// Combines measured tile statistics with the geometry porosity.
  static GeometryStats from(const TileStats& ts, double phi);
  /// Manual inputs with alpha_B estimated as 0.95 * alpha_M.
  static GeometryStats manual(double phi, double phi_t, double alpha_m,
                              double ratio_tiles = 4.0);
};

struct NodeCosts {
  double m_node;  // minimum bytes stored per node
  double b_node;  // minimum bytes transferred per node per iteration
};

NodeCosts node_costs(const CostParams& p);

/// Overheads of the indirect-addressing schemes used for comparison.
struct IndirectOverhead {
  double delta_m;
  double m_addressing;  // index storage component
  double m_race_copy;   // second f_i copy component
  double delta_b;
  double b_addressing;
  double b_double_access;  // extra full read/write pass (FIA only)
  double predicted_perf;   // 1 / (1 + delta_b)
};

IndirectOverhead overhead_cm(const CostParams& p);
IndirectOverhead overhead_fia(const CostParams& p, double phi);

/// Overheads of the tile methods with the component breakdown.
struct TileOverhead {
  double delta_m;
  struct {
    double solid_fill;  // 1/phi_t - 1: solid nodes stored inside tiles
    double node_type;   // node type array
    double sync;        // second copy (T2C) or ghost buffers (TGB)
    double addressing;  // tile map (T2C) or ghost buffer indices (TGB)
  } m;
  double delta_b;
  struct {
    double node_type;   // haloed node-type reads
    double addressing;  // neighbor-tile or ghost-buffer indices
  } b;
  double delta_b_bt;      // pessimistic bound under burst transactions
  double predicted_perf;  // 1 / (1 + delta_b)
};

TileOverhead overhead_t2c(const CostParams& p, const GeometryStats& s);
TileOverhead overhead_tgb(const CostParams& p, const GeometryStats& s);

/// Lattice constants of the ghost-buffer accounting.
double c_gb(const LatticeDescriptor& lat);  // (q_s + 2 q_d + 3 q_t) / q
int c_gbi(const LatticeDescriptor& lat);    // 2 q_s + 5 q_d + 10 q_t

/// Fraction of peak memory bandwidth needed to sustain a measured rate of
/// P MLUPS, BU = P * 1e6 * B_node / B_peak.
double bandwidth_utilization(double p_mlups, const CostParams& p, double b_peak);

/// Transferred bytes per floating-point operation for a given FLOP count.
double bytes_per_flop(const CostParams& p, double flop_count);

struct OverheadReport {
  CostParams params;
  GeometryStats stats;
  std::optional<TileOverhead> t2c;
  std::optional<TileOverhead> tgb;
  std::optional<IndirectOverhead> cm;
  std::optional<IndirectOverhead> fia;
};

struct MethodSelection {
  bool t2c = true;
  bool tgb = true;
  bool cm = true;
  bool fia = true;
};

OverheadReport make_overhead_report(const CostParams& p, const GeometryStats& s,
                                    MethodSelection methods = {});

/// Aligned human-readable table.
std::string render_overhead_text(const OverheadReport& r);
/// Line-oriented key=value form with deterministic key order.
std::string render_overhead_kv(const OverheadReport& r);

}  // namespace splbm
