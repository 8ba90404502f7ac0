#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "splbm/errors.hpp"

namespace splbm {

enum class NodeType : std::uint8_t { Solid = 0, Fluid = 1, VelocityBC = 2, PressureBC = 3 };

inline bool is_solid(NodeType t) { return t == NodeType::Solid; }

/// Global boundary parameters: one prescribed velocity for all VelocityBC
/// nodes and one prescribed density for all PressureBC nodes.
struct BcParams {
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double density = 1.0;
};

/// A dense raster of node types over an nx x ny (x nz) domain, row-major with
/// x fastest. Immutable by convention once built.
struct Geometry {
  int d = 2;                          // 2 or 3
  std::array<int, 3> dims{0, 0, 1};   // nz = 1 for 2D
  std::vector<NodeType> types;
  BcParams bc;

  Geometry() = default;
  Geometry(int d_, std::array<int, 3> dims_)
      : d(d_), dims(dims_),
        types(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], NodeType::Fluid) {}

  std::size_t node_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int x, int y, int z = 0) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(y) +
                                                static_cast<std::size_t>(dims[1]) * z);
  }
  NodeType at(int x, int y, int z = 0) const { return types[index(x, y, z)]; }
  NodeType& at(int x, int y, int z = 0) { return types[index(x, y, z)]; }

  std::size_t solid_count() const;
  std::size_t fluid_count() const;  // non-solid (fluid and boundary) nodes
};

struct Porosity {
  double phi;  // non-solid fraction
  double eta;  // solid fraction
};

Porosity porosity(const Geometry& g);

enum class GeometryFormat { Text, Binary };

Geometry load_geometry(const std::string& bytes, GeometryFormat format);
Geometry load_geometry_file(const std::string& path);  // detects the format
std::string save_geometry(const Geometry& g, GeometryFormat format);
void save_geometry_file(const Geometry& g, const std::string& path,
                        GeometryFormat format);

enum class GeometryKind { Cavity2D, Cavity3D, Channel2D, Ras3D };

struct GenerateParams {
  std::array<int, 3> dims{0, 0, 1};
  double lid_speed = 0.05;        // cavity lid velocity along +x
  double inlet_speed = 0.05;      // channel inlet velocity along +x
  double outlet_density = 1.0;    // channel outlet density
  int sphere_diameter = 40;       // ras3d
  double target_porosity = 0.9;   // ras3d
  std::uint64_t seed = 0;         // ras3d
};

/// Builds one of the synthetic test geometries. Deterministic for a fixed
/// seed. Throws ConfigError on invalid parameters.
Geometry generate(GeometryKind kind, const GenerateParams& params);

}  // namespace splbm
