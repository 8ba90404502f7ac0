#include <doctest.h>

#include "splbm/geometry.hpp"
#include "test_util.hpp"

using namespace splbm;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("porosity of trivial domains") {
  Geometry fluid(2, {8, 8, 1});
  auto p = porosity(fluid);
  CHECK(p.phi == 1.0);
  CHECK(p.eta == 0.0);

  Geometry solid(2, {8, 8, 1});
  std::fill(solid.types.begin(), solid.types.end(), NodeType::Solid);
  p = porosity(solid);
  CHECK(p.phi == 0.0);
  CHECK(p.eta == 1.0);
  CHECK(p.phi + p.eta == 1.0);
}

TEST_CASE("text format parses the documented example") {
  const Geometry g = load_geometry("D2 3 1\n#.#\n", GeometryFormat::Text);
  CHECK(g.d == 2);
  CHECK(g.dims == std::array<int, 3>{3, 1, 1});
  CHECK(g.at(0, 0) == NodeType::Solid);
  CHECK(g.at(1, 0) == NodeType::Fluid);
  CHECK(g.at(2, 0) == NodeType::Solid);
}

TEST_CASE("text format reports the position of a bad character") {
  try {
    load_geometry("D2 3 2\n#.#\n#X#\n", GeometryFormat::Text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 2);
  }
}

TEST_CASE("text format parses boundary parameter lines") {
  const Geometry g =
      load_geometry("D2 2 2\nVV\n..\nvel 0.05 -0.01\n", GeometryFormat::Text);
  CHECK(g.bc.velocity[0] == doctest::Approx(0.05));
  CHECK(g.bc.velocity[1] == doctest::Approx(-0.01));
  CHECK_THROWS_AS(load_geometry("D2 2 1\n..\nwhat 1\n", GeometryFormat::Text), ParseError);
  CHECK_THROWS_AS(load_geometry("D2 5 1\n...\n", GeometryFormat::Text), ParseError);
}

TEST_CASE("binary format rejects a payload size mismatch") {
  Geometry g(2, {4, 2, 1});
  std::string bytes = save_geometry(g, GeometryFormat::Binary);
  bytes.pop_back();
  CHECK_THROWS_AS(load_geometry(bytes, GeometryFormat::Binary), ParseError);
  bytes.push_back(0);
  bytes.push_back(9);  // invalid type code
  CHECK_THROWS_AS(load_geometry(bytes, GeometryFormat::Binary), ParseError);
}

TEST_CASE("save/load round trip preserves the types array in both formats") {
  GenerateParams p;
  p.dims = {64, 64, 1};
  const Geometry g = generate(GeometryKind::Cavity2D, p);
  for (GeometryFormat fmt : {GeometryFormat::Text, GeometryFormat::Binary}) {
    const Geometry back = load_geometry(save_geometry(g, fmt), fmt);
    CHECK(back.d == g.d);
    CHECK(back.dims == g.dims);
    CHECK(back.types == g.types);
    if (fmt == GeometryFormat::Text) {
      CHECK(back.bc.velocity == g.bc.velocity);
    }
  }

  GenerateParams r;
  r.dims = {24, 24, 24};
  r.sphere_diameter = 8;
  r.target_porosity = 0.8;
  r.seed = 5;
  const Geometry ras = generate(GeometryKind::Ras3D, r);
  for (GeometryFormat fmt : {GeometryFormat::Text, GeometryFormat::Binary}) {
    const Geometry back = load_geometry(save_geometry(ras, fmt), fmt);
    CHECK(back.types == ras.types);
    CHECK(back.dims == ras.dims);
  }
}

TEST_CASE("cavity2d has one lid row and walls owning the corners") {
  GenerateParams p;
  p.dims = {4, 4, 1};
  p.lid_speed = 0.1;
  const Geometry g = generate(GeometryKind::Cavity2D, p);
  int solid = 0, lid = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      solid += g.at(x, y) == NodeType::Solid;
      lid += g.at(x, y) == NodeType::VelocityBC;
    }
  }
  CHECK(solid == 2 * 4 + 2);
  CHECK(lid == 2);
  CHECK(g.at(1, 3) == NodeType::VelocityBC);
  CHECK(g.at(2, 3) == NodeType::VelocityBC);
  CHECK(g.at(0, 3) == NodeType::Solid);
  CHECK(g.at(1, 1) == NodeType::Fluid);
  CHECK(g.bc.velocity[0] == doctest::Approx(0.1));
}

TEST_CASE("cavity3d has one lid plane at the top and solid walls elsewhere") {
  GenerateParams p;
  p.dims = {5, 5, 5};
  p.lid_speed = 0.08;
  const Geometry g = generate(GeometryKind::Cavity3D, p);
  int solid = 0, lid = 0, fluid = 0;
  for (int z = 0; z < 5; ++z) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 5; ++x) {
        switch (g.at(x, y, z)) {
          case NodeType::Solid: ++solid; break;
          case NodeType::VelocityBC: ++lid; break;
          default: ++fluid; break;
        }
      }
    }
  }
  CHECK(lid == 3 * 3);  // interior of the top plane
  CHECK(fluid == 3 * 3 * 3);
  CHECK(solid == 125 - 9 - 27);
  CHECK(g.at(2, 2, 4) == NodeType::VelocityBC);
  CHECK(g.at(2, 2, 0) == NodeType::Solid);
  CHECK(g.at(0, 2, 4) == NodeType::Solid);
  CHECK(g.at(2, 2, 2) == NodeType::Fluid);
}

TEST_CASE("channel2d has walls, a velocity inlet and a pressure outlet") {
  GenerateParams p;
  p.dims = {8, 5, 1};
  const Geometry g = generate(GeometryKind::Channel2D, p);
  for (int x = 0; x < 8; ++x) {
    CHECK(g.at(x, 0) == NodeType::Solid);
    CHECK(g.at(x, 4) == NodeType::Solid);
  }
  for (int y = 1; y < 4; ++y) {
    CHECK(g.at(0, y) == NodeType::VelocityBC);
    CHECK(g.at(7, y) == NodeType::PressureBC);
  }
  CHECK(g.at(3, 2) == NodeType::Fluid);
}

TEST_CASE("ras3d is deterministic for a fixed seed") {
  GenerateParams p;
  p.dims = {32, 32, 32};
  p.sphere_diameter = 10;
  p.target_porosity = 0.8;
  p.seed = 1234;
  const Geometry a = generate(GeometryKind::Ras3D, p);
  const Geometry b = generate(GeometryKind::Ras3D, p);
  CHECK(a.types == b.types);
  p.seed = 1235;
  const Geometry c = generate(GeometryKind::Ras3D, p);
  CHECK(a.types != c.types);
}

TEST_CASE("ras3d hits the target porosity within 0.01 at 96^3") {
  for (double target : {0.7, 0.8, 0.9}) {
    GenerateParams p;
    p.dims = {96, 96, 96};
    p.sphere_diameter = 40;
    p.target_porosity = target;
    p.seed = 77;
    const Geometry g = generate(GeometryKind::Ras3D, p);
    const double phi = porosity(g).phi;
    CHECK(phi >= target - 0.01);
    CHECK(phi <= target + 0.01);
  }
}

TEST_CASE("generator parameter validation") {
  GenerateParams p;
  p.dims = {16, 16, 16};
  p.sphere_diameter = 16;
  CHECK_THROWS_AS(generate(GeometryKind::Ras3D, p), ConfigError);
  p.sphere_diameter = 8;
  p.target_porosity = 1.5;
  CHECK_THROWS_AS(generate(GeometryKind::Ras3D, p), ConfigError);
  GenerateParams tiny;
  tiny.dims = {2, 2, 1};
  CHECK_THROWS_AS(generate(GeometryKind::Cavity2D, tiny), ConfigError);
}

TEST_SUITE_END();
