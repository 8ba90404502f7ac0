#include "splbm/overhead.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace splbm {
namespace {

double tile_nodes(const CostParams& p) {
  return std::pow(static_cast<double>(p.a), p.lat->d);
}

// Minimum transfer for a tile, B_tile = n_tn * phi_t * B_node.
double b_tile(const CostParams& p, double phi_t) {
  return tile_nodes(p) * phi_t * node_costs(p).b_node;
}

void require_phi_t(double phi_t) {
  if (!(phi_t > 0.0)) throw DomainError("tile porosity must be positive");
}

}  // namespace

void CostParams::validate() const {
  if (lat == nullptr) throw ConfigError("cost parameters need a lattice");
  if (s_d != 4 && s_d != 8) throw ConfigError("s_d must be 4 or 8 bytes");
  for (double v : {s_t, s_ti, s_gbi, s_b}) {
    if (!(v > 0)) throw ConfigError("size parameters must be positive");
  }
  for (double v : {s_idx_cm, s_idx_fia}) {
    if (v < 0) throw ConfigError("index sizes must be non-negative");
  }
  if (a < 2) throw ConfigError("tile edge must be at least 2");
}

GeometryStats GeometryStats::from(const TileStats& ts, double phi) {
  GeometryStats s;
  s.phi = phi;
  s.phi_t = ts.phi_t;
  s.alpha_m = ts.alpha_m;
  s.alpha_b = ts.alpha_b;
  s.ratio_tiles = ts.ratio_tiles;
  return s;
}

GeometryStats GeometryStats::manual(double phi, double phi_t, double alpha_m,
                                    double ratio_tiles) {
  GeometryStats s;
  s.phi = phi;
  s.phi_t = phi_t;
  s.alpha_m = alpha_m;
  s.alpha_b = 0.95 * alpha_m;
  s.alpha_b_estimated = true;
  s.ratio_tiles = ratio_tiles;
  return s;
}

NodeCosts node_costs(const CostParams& p) {
  const double q = p.lat->q;
  return {q * p.s_d, 2.0 * q * p.s_d};
}

IndirectOverhead overhead_cm(const CostParams& p) {
  const NodeCosts nc = node_costs(p);
  IndirectOverhead o{};
  o.m_addressing = (p.lat->q - 1) * p.s_idx_cm / nc.m_node;
  o.m_race_copy = 1.0;
  o.delta_m = o.m_addressing + o.m_race_copy;
  o.b_addressing = (p.lat->q - 1) * p.s_idx_cm / nc.b_node;
  o.b_double_access = 0.0;
  o.delta_b = o.b_addressing;
  o.predicted_perf = 1.0 / (1.0 + o.delta_b);
  return o;
}

IndirectOverhead overhead_fia(const CostParams& p, double phi) {
  if (!(phi > 0.0)) throw DomainError("porosity must be positive");
  const NodeCosts nc = node_costs(p);
  IndirectOverhead o{};
  o.m_addressing = p.s_idx_fia / (phi * nc.m_node);
  o.m_race_copy = 1.0;
  o.delta_m = o.m_addressing + o.m_race_copy;
  o.b_addressing = p.s_idx_fia / (phi * nc.b_node);
  o.b_double_access = 1.0;
  o.delta_b = o.b_addressing + o.b_double_access;
  o.predicted_perf = 1.0 / (1.0 + o.delta_b);
  return o;
}

double c_gb(const LatticeDescriptor& lat) {
  return static_cast<double>(lat.q_s + 2 * lat.q_d + 3 * lat.q_t) / lat.q;
}

int c_gbi(const LatticeDescriptor& lat) {
  return 2 * lat.q_s + 5 * lat.q_d + 10 * lat.q_t;
}

TileOverhead overhead_t2c(const CostParams& p, const GeometryStats& s) {
  p.validate();
  require_phi_t(s.phi_t);
  const NodeCosts nc = node_costs(p);
  const double n_tn = tile_nodes(p);
  TileOverhead o{};
  o.m.solid_fill = 1.0 / s.phi_t - 1.0;
  o.m.node_type = p.s_t / (nc.m_node * s.phi_t);
  o.m.sync = 1.0 / s.phi_t;
  o.m.addressing = s.ratio_tiles * p.s_ti / (s.phi_t * n_tn * nc.m_node);
  o.delta_m = o.m.solid_fill + o.m.node_type + o.m.sync + o.m.addressing;

  const double bt = b_tile(p, s.phi_t);
  o.b.node_type = std::pow(p.a + 2.0, p.lat->d) * p.s_t / bt;
  o.b.addressing = (p.lat->q - 1) * p.s_ti / bt;
  o.delta_b = o.b.node_type + o.b.addressing;
  o.delta_b_bt = o.delta_b + (1.0 / s.phi_t - 1.0);
  o.predicted_perf = 1.0 / (1.0 + o.delta_b);
  return o;
}

TileOverhead overhead_tgb(const CostParams& p, const GeometryStats& s) {
  p.validate();
  require_phi_t(s.phi_t);
  const NodeCosts nc = node_costs(p);
  const double n_tn = tile_nodes(p);
  const double cgb = c_gb(*p.lat);
  const double cgbi = c_gbi(*p.lat);
  TileOverhead o{};
  o.m.solid_fill = 1.0 / s.phi_t - 1.0;
  o.m.node_type = p.s_t / (nc.m_node * s.phi_t);
  o.m.sync = cgb * 2.0 * s.alpha_m / (p.a * s.phi_t);
  o.m.addressing = cgbi * p.s_gbi / (s.phi_t * n_tn * nc.m_node);
  o.delta_m = o.m.solid_fill + o.m.node_type + o.m.sync + o.m.addressing;

  const double bt = b_tile(p, s.phi_t);
  o.b.node_type = std::pow(p.a + 2.0, p.lat->d) * p.s_t / bt;
  o.b.addressing = cgbi * p.s_gbi / bt;
  o.delta_b = o.b.node_type + o.b.addressing;

  const double q_c = p.lat->d == 2 ? p.lat->q_d : p.lat->q_t;
  const double b_gbnc = (cgbi - q_c) * (n_tn / p.a) * p.s_d;
  const double b_gbc = q_c * p.s_b;
  o.delta_b_bt =
      o.delta_b + (1.0 / s.phi_t - 1.0) + s.alpha_b * (b_gbnc + b_gbc) / bt;
  o.predicted_perf = 1.0 / (1.0 + o.delta_b);
  return o;
}

double bandwidth_utilization(double p_mlups, const CostParams& p, double b_peak) {
  if (!(b_peak > 0.0)) throw DomainError("peak bandwidth must be positive");
  if (p_mlups < 0.0) throw DomainError("performance must be non-negative");
  return p_mlups * 1e6 * node_costs(p).b_node / b_peak;
}

double bytes_per_flop(const CostParams& p, double flop_count) {
  if (!(flop_count > 0.0)) throw DomainError("FLOP count must be positive");
  return node_costs(p).b_node / flop_count;
}

OverheadReport make_overhead_report(const CostParams& p, const GeometryStats& s,
                                    MethodSelection methods) {
  p.validate();
  OverheadReport r;
  r.params = p;
  r.stats = s;
  if (methods.t2c) r.t2c = overhead_t2c(p, s);
  if (methods.tgb) r.tgb = overhead_tgb(p, s);
  if (methods.cm) r.cm = overhead_cm(p);
  if (methods.fia) r.fia = overhead_fia(p, s.phi);
  return r;
}

namespace {

void kv(std::ostringstream& out, const std::string& key, double value) {
  out << key << '=' << std::setprecision(12) << value << '\n';
}

}  // namespace

std::string render_overhead_text(const OverheadReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "method   delta_M   delta_B   delta_B_bt  perf(1/(1+dB))\n";
  auto tile_row = [&](const char* name, const TileOverhead& o) {
    out << std::left << std::setw(8) << name << ' ' << std::setw(9) << o.delta_m
        << ' ' << std::setw(9) << o.delta_b << ' ' << std::setw(11) << o.delta_b_bt
        << ' ' << o.predicted_perf << '\n';
  };
  auto ind_row = [&](const char* name, const IndirectOverhead& o) {
    out << std::left << std::setw(8) << name << ' ' << std::setw(9) << o.delta_m
        << ' ' << std::setw(9) << o.delta_b << ' ' << std::setw(11) << "-" << ' '
        << o.predicted_perf << '\n';
  };
  if (r.t2c) tile_row("t2c", *r.t2c);
  if (r.tgb) tile_row("tgb", *r.tgb);
  if (r.cm) ind_row("cm", *r.cm);
  if (r.fia) ind_row("fia", *r.fia);
  if (r.stats.alpha_b_estimated) {
    out << "note: alpha_B estimated as 0.95 * alpha_M\n";
  }
  return out.str();
}

std::string render_overhead_kv(const OverheadReport& r) {
  std::ostringstream out;
  kv(out, "inputs.phi", r.stats.phi);
  kv(out, "inputs.phi_t", r.stats.phi_t);
  kv(out, "inputs.alpha_m", r.stats.alpha_m);
  kv(out, "inputs.alpha_b", r.stats.alpha_b);
  out << "inputs.alpha_b_estimated=" << (r.stats.alpha_b_estimated ? 1 : 0) << '\n';
  kv(out, "inputs.ratio_tiles", r.stats.ratio_tiles);
  auto tile_kv = [&](const std::string& m, const TileOverhead& o) {
    kv(out, m + ".delta_m", o.delta_m);
    kv(out, m + ".delta_m.solid_fill", o.m.solid_fill);
    kv(out, m + ".delta_m.node_type", o.m.node_type);
    kv(out, m + ".delta_m.sync", o.m.sync);
    kv(out, m + ".delta_m.addressing", o.m.addressing);
    kv(out, m + ".delta_b", o.delta_b);
    kv(out, m + ".delta_b.node_type", o.b.node_type);
    kv(out, m + ".delta_b.addressing", o.b.addressing);
    kv(out, m + ".delta_b_bt", o.delta_b_bt);
    kv(out, m + ".predicted_perf", o.predicted_perf);
  };
  auto ind_kv = [&](const std::string& m, const IndirectOverhead& o) {
    kv(out, m + ".delta_m", o.delta_m);
    kv(out, m + ".delta_m.addressing", o.m_addressing);
    kv(out, m + ".delta_m.race_copy", o.m_race_copy);
    kv(out, m + ".delta_b", o.delta_b);
    kv(out, m + ".delta_b.addressing", o.b_addressing);
    kv(out, m + ".delta_b.double_access", o.b_double_access);
    kv(out, m + ".predicted_perf", o.predicted_perf);
  };
  if (r.t2c) tile_kv("t2c", *r.t2c);
  if (r.tgb) tile_kv("tgb", *r.tgb);
  if (r.cm) ind_kv("cm", *r.cm);
  if (r.fia) ind_kv("fia", *r.fia);
  return out.str();
}

}  // namespace splbm
