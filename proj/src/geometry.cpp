#include "splbm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace splbm {
namespace {

constexpr char kBinaryMagic[4] = {'S', 'P', 'L', 'B'};

char type_to_char(NodeType t) {
  switch (t) {
    case NodeType::Solid: return '#';
    case NodeType::Fluid: return '.';
    case NodeType::VelocityBC: return 'V';
    case NodeType::PressureBC: return 'P';
  }
  return '?';
}

bool char_to_type(char c, NodeType& out) {
  switch (c) {
    case '#': out = NodeType::Solid; return true;
    case '.': out = NodeType::Fluid; return true;
    case 'V': out = NodeType::VelocityBC; return true;
    case 'P': out = NodeType::PressureBC; return true;
    default: return false;
  }
}

void append_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

Geometry load_text(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) throw ParseError("empty geometry file", 1, 1);
  ++line_no;
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  int d = 0;
  if (tag == "D2") d = 2;
  else if (tag == "D3") d = 3;
  else throw ParseError("expected 'D2' or 'D3' header", line_no, 1);

  std::array<int, 3> dims{0, 0, 1};
  header >> dims[0] >> dims[1];
  if (d == 3) header >> dims[2];
  if (header.fail() || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw ParseError("invalid dimensions in header", line_no, 1);
  }

  Geometry g(d, dims);
  for (int z = 0; z < dims[2]; ++z) {
    if (z > 0) {
      // one blank line between slices
      if (!std::getline(in, line)) throw ParseError("missing slice separator", line_no + 1, 1);
      ++line_no;
      if (!line.empty()) throw ParseError("expected blank line between slices", line_no, 1);
    }
    for (int y = 0; y < dims[1]; ++y) {
      if (!std::getline(in, line)) {
        throw ParseError("unexpected end of file: missing row", line_no + 1, 1);
      }
      ++line_no;
      if (static_cast<int>(line.size()) != dims[0]) {
        throw ParseError("row has " + std::to_string(line.size()) +
                             " characters, expected " + std::to_string(dims[0]),
                         line_no, static_cast<long>(line.size()) + 1);
      }
      for (int x = 0; x < dims[0]; ++x) {
        NodeType t;
        if (!char_to_type(line[static_cast<std::size_t>(x)], t)) {
          throw ParseError(std::string("unknown node character '") + line[x] + "'",
                           line_no, x + 1);
        }
        g.at(x, y, z) = t;
      }
    }
  }

  // optional trailing parameter lines
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "vel") {
      ls >> g.bc.velocity[0] >> g.bc.velocity[1];
      if (d == 3) ls >> g.bc.velocity[2];
      if (ls.fail()) throw ParseError("invalid 'vel' line", line_no, 1);
    } else if (key == "rho") {
      ls >> g.bc.density;
      if (ls.fail()) throw ParseError("invalid 'rho' line", line_no, 1);
    } else {
      throw ParseError("unknown trailing line '" + key + "'", line_no, 1);
    }
  }
  return g;
}

Geometry load_binary(const std::string& bytes) {
  constexpr std::size_t header_size = 4 + 1 + 1 + 12;
  if (bytes.size() < header_size) throw ParseError("truncated binary header");
  if (std::memcmp(bytes.data(), kBinaryMagic, 4) != 0) {
    throw ParseError("bad magic, expected 'SPLB'");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (p[4] != 1) throw ParseError("unsupported version " + std::to_string(p[4]));
  const int d = p[5];
  if (d != 2 && d != 3) throw ParseError("dimension must be 2 or 3");
  std::array<int, 3> dims;
  for (int k = 0; k < 3; ++k) {
    dims[k] = static_cast<int>(read_u32le(p + 6 + 4 * k));
    if (dims[k] <= 0) throw ParseError("zero dimension in header");
  }
  if (d == 2 && dims[2] != 1) throw ParseError("2D geometry requires nz = 1");
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (bytes.size() - header_size != n) {
    throw ParseError("dimension mismatch: header declares " + std::to_string(n) +
                     " nodes, payload has " + std::to_string(bytes.size() - header_size) +
                     " bytes");
  }
  Geometry g(d, dims);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char code = p[header_size + i];
    if (code > 3) {
      throw ParseError("invalid node type code " + std::to_string(code) +
                       " at offset " + std::to_string(header_size + i));
    }
    g.types[i] = static_cast<NodeType>(code);
  }
  return g;
}

std::string save_text(const Geometry& g) {
  std::ostringstream out;
  out << (g.d == 2 ? "D2 " : "D3 ") << g.dims[0] << ' ' << g.dims[1];
  if (g.d == 3) out << ' ' << g.dims[2];
  out << '\n';
  bool has_vel = false, has_rho = false;
  for (int z = 0; z < g.dims[2]; ++z) {
    if (z > 0) out << '\n';
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int x = 0; x < g.dims[0]; ++x) {
        const NodeType t = g.at(x, y, z);
        has_vel |= t == NodeType::VelocityBC;
        has_rho |= t == NodeType::PressureBC;
        out << type_to_char(t);
      }
      out << '\n';
    }
  }
  out.precision(17);
  if (has_vel) {
    out << "vel " << g.bc.velocity[0] << ' ' << g.bc.velocity[1];
    if (g.d == 3) out << ' ' << g.bc.velocity[2];
    out << '\n';
  }
  if (has_rho) out << "rho " << g.bc.density << '\n';
  return out.str();
}

std::string save_binary(const Geometry& g) {
  std::string out;
  out.reserve(18 + g.node_count());
  out.append(kBinaryMagic, 4);
  out.push_back(1);
  out.push_back(static_cast<char>(g.d));
  for (int k = 0; k < 3; ++k) append_u32le(out, static_cast<std::uint32_t>(g.dims[k]));
  for (NodeType t : g.types) out.push_back(static_cast<char>(t));
  return out;
}

// 53-bit uniform double in [0, 1); keeps generation portable across
// standard library implementations.
double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Geometry generate_cavity(int d, std::array<int, 3> dims, double lid_speed) {
  for (int k = 0; k < d; ++k) {
    if (dims[k] < 3) throw ConfigError("cavity dimensions must be at least 3");
  }
  Geometry g(d, dims);
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  // Side walls own the full height; the lid occupies the interior of the top
  // row (2D) or plane (3D).
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const bool side = (x == 0 || x == nx - 1) ||
                          (d == 3 && (y == 0 || y == ny - 1));
        const bool floor = (d == 2) ? (y == 0) : (z == 0);
        const bool top = (d == 2) ? (y == ny - 1) : (z == nz - 1);
        if (side || (floor && !side)) {
          g.at(x, y, z) = NodeType::Solid;
        } else if (top) {
          g.at(x, y, z) = NodeType::VelocityBC;
        }
      }
    }
  }
  g.bc.velocity = {lid_speed, 0.0, 0.0};
  return g;
}

Geometry generate_channel(std::array<int, 3> dims, double inlet_speed,
                          double outlet_density) {
  if (dims[0] < 3 || dims[1] < 3) throw ConfigError("channel dimensions must be at least 3");
  Geometry g(2, {dims[0], dims[1], 1});
  const int nx = dims[0], ny = dims[1];
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      if (y == 0 || y == ny - 1) {
        g.at(x, y) = NodeType::Solid;
      } else if (x == 0) {
        g.at(x, y) = NodeType::VelocityBC;
      } else if (x == nx - 1) {
        g.at(x, y) = NodeType::PressureBC;
      }
    }
  }
  g.bc.velocity = {inlet_speed, 0.0, 0.0};
  g.bc.density = outlet_density;
  return g;
}

// Random overlapping spheres with periodic wrap, inserted until the measured
// porosity reaches target + 0.01. Near the target a candidate that would
// overshoot below target - 0.01 is skipped so that coarse sphere volumes
// cannot blow the porosity tolerance; a retry cap keeps this terminating.
Geometry generate_ras(std::array<int, 3> dims, int diameter, double target,
                      std::uint64_t seed) {
  const int min_dim = std::min({dims[0], dims[1], dims[2]});
  if (diameter < 2) throw ConfigError("sphere diameter must be at least 2");
  if (diameter >= min_dim) {
    throw ConfigError("sphere diameter must be smaller than the smallest dimension");
  }
  if (!(target > 0.0 && target < 1.0)) {
    throw ConfigError("target porosity must lie in (0, 1)");
  }

  Geometry g(3, dims);
  const std::size_t n_total = g.node_count();
  const double r = diameter / 2.0;
  const double r2 = r * r;
  std::mt19937_64 rng(seed);
  std::size_t solid = 0;

  auto mark_sphere = [&](double cx, double cy, double cz, bool commit) -> std::size_t {
    std::size_t newly = 0;
    const int x0 = static_cast<int>(std::floor(cx - r)), x1 = static_cast<int>(std::ceil(cx + r));
    const int y0 = static_cast<int>(std::floor(cy - r)), y1 = static_cast<int>(std::ceil(cy + r));
    const int z0 = static_cast<int>(std::floor(cz - r)), z1 = static_cast<int>(std::ceil(cz + r));
    for (int z = z0; z <= z1; ++z) {
      const double dz = z - cz;
      const int wz = ((z % dims[2]) + dims[2]) % dims[2];
      for (int y = y0; y <= y1; ++y) {
        const double dy = y - cy;
        const int wy = ((y % dims[1]) + dims[1]) % dims[1];
        for (int x = x0; x <= x1; ++x) {
          const double dx = x - cx;
          if (dx * dx + dy * dy + dz * dz > r2) continue;
          const int wx = ((x % dims[0]) + dims[0]) % dims[0];
          NodeType& t = g.at(wx, wy, wz);
          if (t != NodeType::Solid) {
            ++newly;
            if (commit) t = NodeType::Solid;
          }
        }
      }
    }
    return newly;
  };

  const double upper = target + 0.01;
  const double lower = target - 0.01;
  int skips = 0;
  double best_cx = 0, best_cy = 0, best_cz = 0;
  double best_err = 2.0;
  while (static_cast<double>(n_total - solid) / n_total > upper) {
    const double cx = canonical(rng) * dims[0];
    const double cy = canonical(rng) * dims[1];
    const double cz = canonical(rng) * dims[2];
    const std::size_t newly = mark_sphere(cx, cy, cz, false);
    const double phi_after = static_cast<double>(n_total - solid - newly) / n_total;
    if (phi_after >= lower || skips >= 2000) {
      solid += mark_sphere(cx, cy, cz, true);
      skips = 0;
      best_err = 2.0;
      continue;
    }
    const double err = std::abs(phi_after - target);
    if (err < best_err) {
      best_err = err;
      best_cx = cx;
      best_cy = cy;
      best_cz = cz;
    }
    if (++skips == 2000) {
      solid += mark_sphere(best_cx, best_cy, best_cz, true);
      skips = 0;
      best_err = 2.0;
    }
  }
  return g;
}

}  // namespace

std::size_t Geometry::solid_count() const {
  return static_cast<std::size_t>(
      std::count(types.begin(), types.end(), NodeType::Solid));
}

std::size_t Geometry::fluid_count() const { return node_count() - solid_count(); }

Porosity porosity(const Geometry& g) {
  const double n = static_cast<double>(g.node_count());
  const double s = static_cast<double>(g.solid_count());
  return {(n - s) / n, s / n};
}

Geometry load_geometry(const std::string& bytes, GeometryFormat format) {
  return format == GeometryFormat::Text ? load_text(bytes) : load_binary(bytes);
}

Geometry load_geometry_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open geometry file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const bool binary = bytes.size() >= 4 && std::memcmp(bytes.data(), kBinaryMagic, 4) == 0;
  return load_geometry(bytes, binary ? GeometryFormat::Binary : GeometryFormat::Text);
}

std::string save_geometry(const Geometry& g, GeometryFormat format) {
  return format == GeometryFormat::Text ? save_text(g) : save_binary(g);
}

void save_geometry_file(const Geometry& g, const std::string& path,
                        GeometryFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write geometry file: " + path);
  const std::string bytes = save_geometry(g, format);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

Geometry generate(GeometryKind kind, const GenerateParams& p) {
  switch (kind) {
    case GeometryKind::Cavity2D:
      return generate_cavity(2, {p.dims[0], p.dims[1], 1}, p.lid_speed);
    case GeometryKind::Cavity3D:
      return generate_cavity(3, p.dims, p.lid_speed);
    case GeometryKind::Channel2D:
      return generate_channel(p.dims, p.inlet_speed, p.outlet_density);
    case GeometryKind::Ras3D:
      return generate_ras(p.dims, p.sphere_diameter, p.target_porosity, p.seed);
  }
  throw ConfigError("unknown geometry kind");
}

}  // namespace splbm
