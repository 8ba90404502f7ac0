// End-to-end checks of the splbm executable: exit codes, key=value output,
// snapshot files, config layering. The binary path comes from the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "splbm_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(SPLBM_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key) {
  REQUIRE(kv.count(key) == 1);
  return std::stod(kv.at(key));
}

}  // namespace

TEST_CASE("stats on an all-fluid square reports unit porosities") {
  const fs::path geo = scratch_dir() / "fluid64.txt";
  {
    std::ofstream out(geo);
    out << "D2 64 64\n";
    for (int y = 0; y < 64; ++y) out << std::string(64, '.') << '\n';
  }
  const CliResult r = run_cli("stats -g " + geo.string() +
                              " --tile 16 --lattice d2q9 --precision f64 --format kv");
  CHECK(r.exit_code == 0);
  const auto kv = parse_kv(r.out);
  CHECK(kv_num(kv, "phi") == 1.0);
  CHECK(kv_num(kv, "phi_t") == 1.0);
  CHECK(kv_num(kv, "n_nodes") == 4096.0);
}

TEST_CASE("generate then stats reproduces the indirect-addressing constant") {
  const fs::path geo = scratch_dir() / "ras.bin";
  CliResult r = run_cli(
      "generate --kind ras3d --dims 48,48,48 --diameter 10 --porosity 0.9 --seed 7 -o " +
      geo.string());
  CHECK(r.exit_code == 0);
  const double phi = kv_num(parse_kv(r.out), "phi");
  CHECK(phi > 0.88);
  CHECK(phi < 0.92);

  r = run_cli("stats -g " + geo.string() + " --tile 4 --lattice d3q19 --format kv");
  CHECK(r.exit_code == 0);
  const auto kv = parse_kv(r.out);
  CHECK(std::abs(kv_num(kv, "cm.delta_b") - 0.237) < 1e-3);
  CHECK(kv_num(kv, "phi_t") > phi);

  // Deterministic output: running twice gives identical bytes.
  const CliResult again =
      run_cli("stats -g " + geo.string() + " --tile 4 --lattice d3q19 --format kv");
  CHECK(again.out == r.out);
}

TEST_CASE("missing geometry file exits 2 without partial output") {
  const CliResult r = run_cli("stats -g /does/not/exist.bin");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK(!r.err.empty());
}

TEST_CASE("run writes the requested snapshots and a summary") {
  const fs::path geo = scratch_dir() / "cav.txt";
  CHECK(run_cli("generate --kind cavity2d --dims 64,64 --lid-velocity 0.05 -o " +
                geo.string())
            .exit_code == 0);
  const fs::path prefix = scratch_dir() / "snap";
  const CliResult r = run_cli("run -g " + geo.string() +
                              " --method t2c --steps 10 --snapshot-every 10 --output " +
                              prefix.string());
  CHECK(r.exit_code == 0);
  const auto kv = parse_kv(r.out);
  CHECK(kv_num(kv, "steps") == 10.0);
  CHECK(kv_num(kv, "snapshots") == 1.0);
  CHECK(fs::exists(scratch_dir() / "snap_000010.vtk"));
  CHECK(!fs::exists(scratch_dir() / "snap_000020.vtk"));

  // steps=0: summary only, nothing written.
  const fs::path prefix0 = scratch_dir() / "none";
  const CliResult r0 = run_cli("run -g " + geo.string() +
                               " --method t2c --steps 0 --snapshot-every 5 --output " +
                               prefix0.string());
  CHECK(r0.exit_code == 0);
  CHECK(kv_num(parse_kv(r0.out), "snapshots") == 0.0);
  CHECK(kv_num(parse_kv(r0.out), "mlups") == 0.0);

  // Single-precision path.
  const CliResult f32 =
      run_cli("run -g " + geo.string() + " --method tgb --steps 10 --precision f32");
  CHECK(f32.exit_code == 0);
}

TEST_CASE("t2c and tgb report the same mass drift") {
  const fs::path geo = scratch_dir() / "cav.txt";
  run_cli("generate --kind cavity2d --dims 32,32 --lid-velocity 0.05 -o " + geo.string());
  const CliResult a =
      run_cli("run -g " + geo.string() + " --method t2c --tile 16 --steps 50");
  const CliResult b =
      run_cli("run -g " + geo.string() + " --method tgb --tile 16 --steps 50");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  const double drift_a = kv_num(parse_kv(a.out), "mass_drift_rel");
  const double drift_b = kv_num(parse_kv(b.out), "mass_drift_rel");
  CHECK(std::abs(drift_a - drift_b) <= 1e-12);
}

TEST_CASE("config file sets values and flags override them") {
  const fs::path geo = scratch_dir() / "cav.txt";
  run_cli("generate --kind cavity2d --dims 32,32 -o " + geo.string());
  const fs::path conf = scratch_dir() / "sim.conf";
  {
    std::ofstream out(conf);
    out << "geometry.path = " << geo.string() << "\n"
        << "sim.method = t2c\n"
        << "sim.steps = 5\n"
        << "sim.tau = 0.8\n";
  }
  const CliResult base = run_cli("run -c " + conf.string());
  CHECK(base.exit_code == 0);
  CHECK(kv_num(parse_kv(base.out), "steps") == 5.0);

  const CliResult overridden = run_cli("run -c " + conf.string() + " --steps 7");
  CHECK(overridden.exit_code == 0);
  CHECK(kv_num(parse_kv(overridden.out), "steps") == 7.0);

  const CliResult bad = run_cli("run -c /does/not/exist.conf");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("bench omits BU without a bandwidth and reports it with one") {
  const fs::path geo = scratch_dir() / "cav.txt";
  run_cli("generate --kind cavity2d --dims 32,32 -o " + geo.string());
  const CliResult no_bu = run_cli("bench -g " + geo.string() +
                                  " --methods dense,t2c --steps 20 --warmup 5");
  CHECK(no_bu.exit_code == 0);
  CHECK(no_bu.out.find(".mlups=") != std::string::npos);
  CHECK(no_bu.out.find(".bu=") == std::string::npos);

  const CliResult with_bu =
      run_cli("bench -g " + geo.string() +
              " --methods dense,t2c --steps 20 --warmup 5 --mem-bandwidth 288.4e9");
  CHECK(with_bu.exit_code == 0);
  CHECK(with_bu.out.find("bench.t2c.current.bu=") != std::string::npos);

  const CliResult verify =
      run_cli("bench -g " + geo.string() +
              " --methods dense,t2c,tgb --steps 20 --warmup 5 --verify");
  CHECK(verify.exit_code == 0);
  CHECK(verify.out.find("verify.dense.vs.t2c") != std::string::npos);

  const CliResult models =
      run_cli("bench -g " + geo.string() +
              " --methods t2c --models bgk-quasi,bgk-incompressible,mrt-quasi --steps 15");
  CHECK(models.exit_code == 0);
  CHECK(models.out.find("bench.t2c.bgk-quasi.mlups=") != std::string::npos);
  CHECK(models.out.find("bench.t2c.bgk-incompressible.mlups=") != std::string::npos);
  CHECK(models.out.find("bench.t2c.mrt-quasi.mlups=") != std::string::npos);
}

TEST_CASE("numerical blowup exits 3 with the failing step") {
  const fs::path geo = scratch_dir() / "cav.txt";
  run_cli("generate --kind cavity2d --dims 32,32 -o " + geo.string());
  const CliResult r = run_cli("run -g " + geo.string() +
                              " --method t2c --steps 200 --tau 0.51 --bc-velocity 3.0,0");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("step") != std::string::npos);
}

TEST_CASE("unknown flags are rejected") {
  const CliResult r = run_cli("run --no-such-flag 1");
  CHECK(r.exit_code == 2);
}
