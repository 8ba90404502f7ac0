#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "splbm/config.hpp"
#include "splbm/engine.hpp"
#include "splbm/overhead.hpp"
#include "splbm/vtk.hpp"

namespace {

using namespace splbm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

Arrangement parse_lattice(const std::string& name) {
  if (name == "d2q9") return Arrangement::D2Q9;
  if (name == "d3q19") return Arrangement::D3Q19;
  if (name == "d3q27") return Arrangement::D3Q27;
  throw ConfigError("unknown lattice: " + name);
}

Method parse_method(const std::string& name) {
  if (name == "dense") return Method::Dense;
  if (name == "t2c") return Method::T2C;
  if (name == "tgb") return Method::TGB;
  throw ConfigError("unknown method: " + name);
}

double parse_precision(const std::string& name) {
  if (name == "f32") return 4;
  if (name == "f64") return 8;
  throw ConfigError("precision must be f32 or f64");
}

Periodicity parse_periodic(const std::string& spec) {
  if (spec == "none" || spec.empty()) return {};
  Periodicity per;
  for (char c : spec) {
    switch (c) {
      case 'x': per.x = true; break;
      case 'y': per.y = true; break;
      case 'z': per.z = true; break;
      case ',': case ' ': break;
      default:
        throw ConfigError("periodic axes must be drawn from x,y,z");
    }
  }
  return per;
}

std::array<int, 3> parse_dims(const std::string& spec) {
  std::array<int, 3> dims{0, 0, 1};
  std::istringstream in(spec);
  std::string item;
  int k = 0;
  while (std::getline(in, item, ',')) {
    if (k >= 3) throw ConfigError("at most three dimensions");
    dims[k++] = std::stoi(item);
  }
  if (k < 2) throw ConfigError("dims needs at least nx,ny");
  return dims;
}

Eigen::Vector3d parse_vec3(const std::string& spec) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  std::istringstream in(spec);
  std::string item;
  int k = 0;
  while (std::getline(in, item, ',')) {
    if (k >= 3) throw ConfigError("at most three components");
    v[k++] = std::stod(item);
  }
  return v;
}

GeometryKind parse_kind(const std::string& name) {
  if (name == "cavity2d") return GeometryKind::Cavity2D;
  if (name == "cavity3d") return GeometryKind::Cavity3D;
  if (name == "channel2d") return GeometryKind::Channel2D;
  if (name == "ras3d") return GeometryKind::Ras3D;
  throw ConfigError("unknown geometry kind: " + name);
}

Geometry build_geometry(const Config& cfg) {
  Geometry g;
  if (cfg.has("geometry.path")) {
    g = load_geometry_file(cfg.require_string("geometry.path"));
  } else if (cfg.has("geometry.kind")) {
    GenerateParams p;
    p.dims = parse_dims(cfg.require_string("geometry.dims"));
    if (cfg.has("geometry.width")) {
      p.dims[1] = static_cast<int>(cfg.get_long("geometry.width", 0)) + 2;
    }
    p.lid_speed = cfg.get_double("geometry.lid_velocity", p.lid_speed);
    p.inlet_speed = cfg.get_double("geometry.inlet_velocity", p.inlet_speed);
    p.outlet_density = cfg.get_double("geometry.outlet_density", p.outlet_density);
    p.sphere_diameter = static_cast<int>(cfg.get_long("geometry.diameter", p.sphere_diameter));
    p.target_porosity = cfg.get_double("geometry.porosity", p.target_porosity);
    p.seed = static_cast<std::uint64_t>(cfg.get_long("geometry.seed", 0));
    g = generate(parse_kind(cfg.require_string("geometry.kind")), p);
  } else {
    throw ConfigError("set geometry.path or geometry.kind");
  }
  // The binary geometry format carries node types only; boundary parameters
  // can be (re)set from the config.
  if (cfg.has("bc.velocity")) g.bc.velocity = parse_vec3(cfg.require_string("bc.velocity"));
  if (cfg.has("bc.density")) g.bc.density = cfg.get_double("bc.density", g.bc.density);
  return g;
}

FluidModel build_model(const Config& cfg) {
  FluidModel m;
  m.tau = cfg.get_double("sim.tau", 0.8);
  const std::string coll = cfg.get_string("sim.collision", "bgk");
  if (coll == "bgk") m.collision = CollisionKind::BGK;
  else if (coll == "mrt") m.collision = CollisionKind::MRT;
  else throw ConfigError("sim.collision must be bgk or mrt");
  const std::string comp = cfg.get_string("sim.compressibility", "quasi");
  if (comp == "quasi" || comp == "quasi-compressible") {
    m.compressibility = Compressibility::QuasiCompressible;
  } else if (comp == "incompressible") {
    m.compressibility = Compressibility::Incompressible;
  } else {
    throw ConfigError("sim.compressibility must be quasi or incompressible");
  }
  return m;
}

SimConfig build_sim(const Config& cfg) {
  SimConfig sim;
  sim.method = parse_method(cfg.get_string("sim.method", "t2c"));
  sim.tile = static_cast<int>(cfg.get_long("sim.tile", 0));
  sim.steps = cfg.get_long("sim.steps", 0);
  sim.snapshot_every = cfg.get_long("sim.snapshot_every", 0);
  sim.threads = static_cast<int>(cfg.get_long("sim.threads", 0));
  sim.periodic = parse_periodic(cfg.get_string("sim.periodic", ""));
  sim.model = build_model(cfg);
  sim.initial_density = cfg.get_double("sim.initial_density", 1.0);
  if (cfg.has("sim.initial_velocity")) {
    sim.initial_velocity = parse_vec3(cfg.require_string("sim.initial_velocity"));
  }
  return sim;
}

void kv_line(const std::string& key, double value) {
  std::cout << key << '=' << std::setprecision(12) << value << '\n';
}

// ---------------------------------------------------------------------------

int cmd_generate(const Config& cfg, const std::string& output) {
  const Geometry g = build_geometry(cfg);
  const std::filesystem::path path(output);
  const std::string ext = path.extension().string();
  const GeometryFormat fmt = (ext == ".txt" || ext == ".geo" || ext == ".text")
                                 ? GeometryFormat::Text
                                 : GeometryFormat::Binary;
  save_geometry_file(g, output, fmt);
  const Porosity p = porosity(g);
  std::cout << "nodes=" << g.node_count() << '\n';
  kv_line("phi", p.phi);
  kv_line("eta", p.eta);
  std::cout << "output=" << output << '\n';
  return kExitOk;
}

int cmd_stats(const Config& cfg) {
  const Geometry g = build_geometry(cfg);
  const std::string lattice_name =
      cfg.get_string("stats.lattice", g.d == 2 ? "d2q9" : "d3q19");
  const LatticeDescriptor& lat = lattice_descriptor(parse_lattice(lattice_name));
  CostParams params;
  params.lat = &lat;
  params.s_d = parse_precision(cfg.get_string("sim.precision", "f64"));
  params.a = static_cast<int>(cfg.get_long("sim.tile", lat.d == 2 ? 16 : 4));
  params.s_t = cfg.get_double("cost.s_t", params.s_t);
  params.s_ti = cfg.get_double("cost.s_ti", params.s_ti);
  params.s_gbi = cfg.get_double("cost.s_gbi", params.s_gbi);
  params.s_b = cfg.get_double("cost.s_b", params.s_b);

  const Periodicity per = parse_periodic(cfg.get_string("sim.periodic", ""));
  const TileGrid tg = build_tile_grid(g, params.a, lat, per);
  const TileStats ts = tile_stats(tg);
  const Porosity p = porosity(g);
  const GeometryStats gs = GeometryStats::from(ts, p.phi);

  MethodSelection methods;
  const auto list = cfg.get_list("stats.methods");
  if (!list.empty()) {
    methods = {false, false, false, false};
    for (const std::string& m : list) {
      if (m == "t2c") methods.t2c = true;
      else if (m == "tgb") methods.tgb = true;
      else if (m == "cm") methods.cm = true;
      else if (m == "fia") methods.fia = true;
      else throw ConfigError("unknown overhead method: " + m);
    }
  }
  const OverheadReport report = make_overhead_report(params, gs, methods);

  const std::string format = cfg.get_string("stats.format", "both");
  if (format == "kv" || format == "both") {
    std::cout << "n_nodes=" << g.node_count() << '\n';
    kv_line("phi", p.phi);
    kv_line("eta", p.eta);
    kv_line("phi_t", ts.phi_t);
    kv_line("eta_t", ts.eta_t);
    kv_line("alpha_m", ts.alpha_m);
    kv_line("alpha_b", ts.alpha_b);
    kv_line("ratio_tiles", ts.ratio_tiles);
    kv_line("reduced_buffer_fraction", ts.reduced_buffer_fraction);
    std::cout << "n_tiles=" << ts.n_tiles << '\n'
              << "n_ftiles=" << ts.n_ftiles << '\n'
              << "ghost_buffers=" << ts.allocated_buffers << '\n';
    std::cout << render_overhead_kv(report);
  }
  if (format == "text" || format == "both") {
    std::cout << '\n' << render_overhead_text(report);
  }
  return kExitOk;
}

struct BenchRow {
  std::string method;
  std::string model;
  double mlups = 0.0;
  double bu = -1.0;
  FieldData fields;
};

template <class T>
BenchRow bench_one(const Geometry& g, SimConfig sim, const std::string& method_name,
                   const std::string& model_name, long warmup, long steps,
                   double bandwidth, const CostParams& cost) {
  ThreadPool pool(sim.threads);
  auto engine = make_engine<T>(g, sim, &pool);
  engine->initialize_uniform(sim.initial_density, sim.initial_velocity);
  for (long s = 0; s < warmup; ++s) {
    if (!engine->step()) throw NumericalError("non-finite state in warmup", s + 1);
  }
  const auto t0 = std::chrono::steady_clock::now();
  for (long s = 0; s < steps; ++s) {
    if (!engine->step()) throw NumericalError("non-finite state", warmup + s + 1);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  BenchRow row;
  row.method = method_name;
  row.model = model_name;
  row.mlups = wall > 0.0 ? static_cast<double>(g.fluid_count()) *
                               static_cast<double>(steps) / (wall * 1e6)
                         : 0.0;
  if (bandwidth > 0.0) row.bu = bandwidth_utilization(row.mlups, cost, bandwidth);
  row.fields = engine->fields();
  return row;
}

int cmd_run(const Config& cfg) {
  const Geometry g = build_geometry(cfg);
  SimConfig sim = build_sim(cfg);
  const std::string precision = cfg.get_string("sim.precision", "f64");
  const std::string prefix = cfg.get_string("sim.output", "");
  if (!prefix.empty() && sim.snapshot_every > 0) {
    sim.snapshot_sink = [&prefix](long step, const FieldData& f,
                                  std::array<int, 3> padded) {
      std::ostringstream name;
      name << prefix << '_' << std::setw(6) << std::setfill('0') << step << ".vtk";
      write_vtk_file(name.str(), f, padded);
    };
  }
  const SimulationResult res = precision == "f32" ? run_simulation<float>(g, sim)
                                                  : run_simulation<double>(g, sim);
  std::cout << "steps=" << res.steps << '\n';
  kv_line("wall_seconds", res.wall_seconds);
  kv_line("mlups", res.mlups);
  kv_line("mass_initial", res.mass_initial);
  kv_line("mass_final", res.mass_final);
  kv_line("mass_drift_rel", res.mass_drift_rel);
  std::cout << "fluid_nodes=" << res.fluid_nodes << '\n'
            << "tile_visits=" << res.tile_visits << '\n'
            << "snapshots=" << res.snapshots_written << '\n';
  if (cfg.has("sim.csv")) {
    write_csv_file(cfg.require_string("sim.csv"), res.fields);
  }
  return kExitOk;
}

int cmd_bench(const Config& cfg) {
  const Geometry g = build_geometry(cfg);
  SimConfig sim = build_sim(cfg);
  const std::string precision = cfg.get_string("sim.precision", "f64");
  const long warmup = cfg.get_long("bench.warmup", 10);
  const long steps = cfg.get_long("bench.steps", std::max<long>(sim.steps, 50));
  const double bandwidth = cfg.get_double("bench.mem_bandwidth", 0.0);
  const bool verify = cfg.get_bool("bench.verify", false);

  std::vector<std::string> methods = cfg.get_list("bench.methods");
  if (methods.empty()) methods = {"dense", "t2c", "tgb"};
  std::vector<std::string> models = cfg.get_list("bench.models");
  if (models.empty()) models = {"current"};

  CostParams cost;
  cost.lat = &detail::solver_lattice(g.d);
  cost.s_d = parse_precision(precision);
  cost.a = sim.tile_edge(g.d);

  std::vector<BenchRow> rows;
  for (const std::string& method : methods) {
    SimConfig s = sim;
    s.method = parse_method(method);
    for (const std::string& model : models) {
      if (model != "current") {
        Config model_cfg = cfg;
        const auto dash = model.find('-');
        if (dash == std::string::npos) {
          throw ConfigError("model spec must look like bgk-quasi: " + model);
        }
        model_cfg.set("sim.collision", model.substr(0, dash));
        model_cfg.set("sim.compressibility", model.substr(dash + 1));
        s.model = build_model(model_cfg);
      }
      rows.push_back(precision == "f32"
                         ? bench_one<float>(g, s, method, model, warmup, steps,
                                            bandwidth, cost)
                         : bench_one<double>(g, s, method, model, warmup, steps,
                                             bandwidth, cost));
    }
  }

  std::cout << "warmup=" << warmup << '\n' << "steps=" << steps << '\n';
  for (const BenchRow& r : rows) {
    std::cout << "bench." << r.method << '.' << r.model
              << ".mlups=" << std::setprecision(6) << r.mlups << '\n';
    if (r.bu >= 0.0) {
      std::cout << "bench." << r.method << '.' << r.model
                << ".bu=" << std::setprecision(6) << r.bu << '\n';
    }
  }
  std::cout << '\n'
            << std::left << std::setw(8) << "method" << ' ' << std::setw(20) << "model"
            << ' ' << std::setw(10) << "MLUPS";
  if (bandwidth > 0.0) std::cout << ' ' << std::setw(8) << "BU";
  std::cout << '\n';
  for (const BenchRow& r : rows) {
    std::cout << std::left << std::setw(8) << r.method << ' ' << std::setw(20) << r.model
              << ' ' << std::setw(10) << std::setprecision(5) << r.mlups;
    if (bandwidth > 0.0) std::cout << ' ' << std::setw(8) << std::setprecision(4) << r.bu;
    std::cout << '\n';
  }

  if (verify && rows.size() > 1) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double diff = linf_rel_diff(rows[0].fields, rows[i].fields);
      std::cout << "verify." << rows[0].method << ".vs." << rows[i].method << '.'
                << rows[i].model << '=' << std::setprecision(6) << diff << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse tile-based lattice Boltzmann solver"};
  app.require_subcommand(1);

  Config cfg;
  std::string config_path;
  std::string output;

  auto add_flag = [&cfg](CLI::App* cmd, const std::string& flag, const std::string& key,
                         const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&cfg, key](const std::string& v) { cfg.set(key, v); }, help);
  };

  CLI::App* gen = app.add_subcommand("generate", "generate a synthetic geometry");
  add_flag(gen, "--kind", "geometry.kind", "cavity2d|cavity3d|channel2d|ras3d");
  add_flag(gen, "--dims", "geometry.dims", "nx,ny[,nz]");
  add_flag(gen, "--diameter", "geometry.diameter", "sphere diameter in nodes");
  add_flag(gen, "--porosity", "geometry.porosity", "target porosity in (0,1)");
  add_flag(gen, "--seed", "geometry.seed", "RNG seed");
  add_flag(gen, "--lid-velocity", "geometry.lid_velocity", "cavity lid speed");
  add_flag(gen, "--inlet-velocity", "geometry.inlet_velocity", "channel inlet speed");
  add_flag(gen, "--outlet-density", "geometry.outlet_density", "channel outlet density");
  add_flag(gen, "--width", "geometry.width", "channel width (sets ny = width + 2)");
  gen->add_option("-o,--output", output, "output path (.txt for text, else binary)")
      ->required();

  CLI::App* stats = app.add_subcommand("stats", "tile statistics and overhead model");
  stats->add_option("-c,--config", config_path, "config file");
  add_flag(stats, "-g,--geometry", "geometry.path", "geometry file");
  add_flag(stats, "--kind", "geometry.kind", "generate instead of loading");
  add_flag(stats, "--dims", "geometry.dims", "nx,ny[,nz]");
  add_flag(stats, "--diameter", "geometry.diameter", "sphere diameter");
  add_flag(stats, "--porosity", "geometry.porosity", "target porosity");
  add_flag(stats, "--seed", "geometry.seed", "RNG seed");
  add_flag(stats, "--tile", "sim.tile", "tile edge a");
  add_flag(stats, "--lattice", "stats.lattice", "d2q9|d3q19|d3q27");
  add_flag(stats, "--precision", "sim.precision", "f32|f64");
  add_flag(stats, "--periodic", "sim.periodic", "periodic axes, e.g. xyz");
  add_flag(stats, "--methods", "stats.methods", "subset of t2c,tgb,cm,fia");
  add_flag(stats, "--format", "stats.format", "kv|text|both");

  CLI::App* run = app.add_subcommand("run", "run a simulation");
  run->add_option("-c,--config", config_path, "config file");
  add_flag(run, "-g,--geometry", "geometry.path", "geometry file");
  add_flag(run, "--kind", "geometry.kind", "generate instead of loading");
  add_flag(run, "--dims", "geometry.dims", "nx,ny[,nz]");
  add_flag(run, "--diameter", "geometry.diameter", "sphere diameter");
  add_flag(run, "--porosity", "geometry.porosity", "target porosity");
  add_flag(run, "--seed", "geometry.seed", "RNG seed");
  add_flag(run, "--lid-velocity", "geometry.lid_velocity", "cavity lid speed");
  add_flag(run, "--method", "sim.method", "dense|t2c|tgb");
  add_flag(run, "--steps", "sim.steps", "iterations");
  add_flag(run, "--tile", "sim.tile", "tile edge a");
  add_flag(run, "--tau", "sim.tau", "relaxation time");
  add_flag(run, "--collision", "sim.collision", "bgk|mrt");
  add_flag(run, "--compressibility", "sim.compressibility", "quasi|incompressible");
  add_flag(run, "--precision", "sim.precision", "f32|f64");
  add_flag(run, "--threads", "sim.threads", "worker threads (0 = hardware)");
  add_flag(run, "--snapshot-every", "sim.snapshot_every", "snapshot cadence");
  add_flag(run, "--output", "sim.output", "snapshot path prefix");
  add_flag(run, "--csv", "sim.csv", "write final fields as CSV");
  add_flag(run, "--periodic", "sim.periodic", "periodic axes, e.g. xy");
  add_flag(run, "--initial-velocity", "sim.initial_velocity", "ux,uy[,uz]");
  add_flag(run, "--bc-velocity", "bc.velocity", "prescribed boundary velocity");
  add_flag(run, "--bc-density", "bc.density", "prescribed boundary density");

  CLI::App* bench = app.add_subcommand("bench", "measure MLUPS per method and model");
  bench->add_option("-c,--config", config_path, "config file");
  add_flag(bench, "-g,--geometry", "geometry.path", "geometry file");
  add_flag(bench, "--kind", "geometry.kind", "generate instead of loading");
  add_flag(bench, "--dims", "geometry.dims", "nx,ny[,nz]");
  add_flag(bench, "--diameter", "geometry.diameter", "sphere diameter");
  add_flag(bench, "--porosity", "geometry.porosity", "target porosity");
  add_flag(bench, "--seed", "geometry.seed", "RNG seed");
  add_flag(bench, "--methods", "bench.methods", "subset of dense,t2c,tgb");
  add_flag(bench, "--models", "bench.models", "e.g. bgk-quasi,mrt-incompressible");
  add_flag(bench, "--steps", "bench.steps", "timed iterations");
  add_flag(bench, "--warmup", "bench.warmup", "untimed warmup iterations");
  add_flag(bench, "--mem-bandwidth", "bench.mem_bandwidth", "peak bytes/s for BU");
  add_flag(bench, "--tile", "sim.tile", "tile edge a");
  add_flag(bench, "--tau", "sim.tau", "relaxation time");
  add_flag(bench, "--precision", "sim.precision", "f32|f64");
  add_flag(bench, "--threads", "sim.threads", "worker threads");
  add_flag(bench, "--periodic", "sim.periodic", "periodic axes");
  add_flag(bench, "--bc-velocity", "bc.velocity", "prescribed boundary velocity");
  add_flag(bench, "--bc-density", "bc.density", "prescribed boundary density");
  bench->add_flag_callback(
      "--verify", [&cfg] { cfg.set("bench.verify", "true"); },
      "cross-check fields between methods");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }
  try {
    // A config file provides the base layer; flags already in cfg win.
    if (!config_path.empty()) {
      Config file_cfg = Config::parse_file(config_path);
      for (const auto& [k, v] : cfg.values()) file_cfg.set(k, v);
      cfg = file_cfg;
    }
    if (gen->parsed()) return cmd_generate(cfg, output);
    if (stats->parsed()) return cmd_stats(cfg);
    if (run->parsed()) return cmd_run(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
