#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "fpde/app.hpp"
#include "fpde/fpde.hpp"
#include "fpde/verify.hpp"

using namespace fpde;
using Catch::Approx;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;
namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fpde_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("snapshot format round trip is bit-identical") {
  Grid g(2, 32, 5.5);
  ScalarField f = band_limited_field(g, 88, 6, 2.0, true);
  const std::string once = encode_snapshot(f);
  ScalarField back = decode_snapshot(once);
  CHECK(back.grid() == g);
  CHECK(sup_norm(back - f) == 0.0);
  CHECK(encode_snapshot(back) == once);

  TempDir dir;
  write_snapshot(dir / "f.fpde", f);
  ScalarField loaded = read_snapshot(dir / "f.fpde");
  CHECK(encode_snapshot(loaded) == once);
}

TEST_CASE("snapshot header layout: magic, version, dims, period, payload size") {
  Grid g(1, 8, 2.0);
  ScalarField f(g, 1.0);
  const std::string data = encode_snapshot(f);
  CHECK(data.substr(0, 4) == "FPDE");
  CHECK(static_cast<unsigned char>(data[4]) == 1);  // version LE
  CHECK(static_cast<unsigned char>(data[6]) == 1);  // dim LE
  CHECK(data.size() == 4 + 2 + 2 + 4 + 8 + 8 * 8);
}

TEST_CASE("malformed snapshots are rejected") {
  Grid g(1, 8, 2.0);
  std::string data = encode_snapshot(ScalarField(g, 1.0));
  CHECK_THROWS_AS(decode_snapshot(data.substr(0, data.size() - 3)), ConfigError);  // truncated
  CHECK_THROWS_AS(decode_snapshot(data + "x"), ConfigError);                       // trailing bytes
  std::string bad = data;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad), ConfigError);  // magic
}

TEST_CASE("csv export lists coordinates then value per grid point") {
  Grid g(2, 8, 2.0);
  ScalarField f(g, 1.5);
  const std::string csv = field_to_csv(f);
  CHECK(csv.rfind("x0,x1,value\n", 0) == 0);
  const std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(rows == 1 + g.total_points());
}

TEST_CASE("heatmaps are 8-bit PGM with recorded normalization") {
  Grid g(2, 16, kTwoPi);
  ScalarField f = ScalarField::sample(g, [](std::span<const double> x) {
    return std::cos(x[0]) + std::sin(x[1]);
  });
  TempDir dir;
  HeatmapInfo info = write_heatmap(dir / "f.pgm", f);
  CHECK(info.lo < info.hi);
  const std::string data = slurp(dir / "f.pgm");
  CHECK(data.rfind("P5\n16 16\n255\n", 0) == 0);
  CHECK(data.size() == std::string("P5\n16 16\n255\n").size() + 256);
}

TEST_CASE("config parsing: full scenario plus defaults") {
  const std::string text =
      "# demo\n[scenario]\nsolver = quasilinear\npreset = sqg\nseed = 7\n"
      "[grid]\ndim = 2\nn = 32\nperiod = 6.283185307179586\n"
      "[stepper]\nscheme = heun\ndt = 4e-3\nt_end = 0.1\nsnapshot_stride = 5\n"
      "[output]\ndir = out/demo\nemit = csv,snapshots\n";
  ScenarioConfig c = parse_scenario_text(text);
  CHECK(c.solver == "quasilinear");
  CHECK(c.preset == "sqg");
  CHECK(c.seed == 7);
  CHECK(c.dim == 2);
  CHECK(c.n == 32);
  CHECK(c.dt == Approx(4e-3));
  CHECK(c.snapshot_stride == 5);
  CHECK(c.emit_csv);
  CHECK(c.emit_snapshots);
  CHECK_FALSE(c.emit_heatmaps);
  CHECK(c.picard_max_iters == 50);  // untouched default
}

TEST_CASE("config rejections: unknown keys, bad types, bad values") {
  const std::string base = "[scenario]\nsolver = linear\npreset = const-coeff\n";
  CHECK_THROWS_AS(parse_scenario_text(base + "mistyped = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[nosuch]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[grid]\nn = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[grid]\nn = 48\n"), ConfigError);  // not a power of two
  CHECK_THROWS_AS(parse_scenario_text(base + "[problem]\na0 = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[problem]\na0 = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[output]\nemit = csv,plots\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[stepper]\nscheme = rk4\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_text(base + "[scenario]\nsolver = linear\n"), ConfigError);  // duplicate
  CHECK_THROWS_AS(parse_scenario_text("[scenario]\nsolver = magic\npreset = x\n"), ConfigError);
}

TEST_CASE("run_scenario: config error exits 2 and produces no output") {
  TempDir dir;
  const std::string cfg = dir / "bad.conf";
  write_file(cfg, "[scenario]\nsolver = linear\npreset = const-coeff\n[problem]\na0 = -0.5\n"
                  "[output]\ndir = " + (dir / "out_bad") + "\n");
  CHECK(app::run_scenario(cfg) == app::exit_config);
  CHECK_FALSE(fs::exists(dir / "out_bad"));
  CHECK(app::run_scenario(dir / "missing.conf") == app::exit_config);
}

TEST_CASE("run_scenario: linear preset writes diagnostics, snapshots and manifest") {
  TempDir dir;
  const std::string out = dir / "out_lin";
  const std::string cfg = dir / "lin.conf";
  write_file(cfg,
             "[scenario]\nsolver = linear\npreset = smooth-var\nic = cosx\nseed = 3\n"
             "[grid]\ndim = 1\nn = 64\nperiod = 6.283185307179586\n"
             "[stepper]\nscheme = heun\ndt = 2e-3\nt_end = 0.1\nsnapshot_stride = 10\n"
             "[output]\ndir = " + out + "\nemit = csv,snapshots,heatmaps\n");
  REQUIRE(app::run_scenario(cfg) == app::exit_ok);
  CHECK(fs::exists(out + "/diagnostics.csv"));
  CHECK(fs::exists(out + "/manifest.txt"));
  CHECK(fs::exists(out + "/snap_000000_c0.fpde"));
  CHECK(fs::exists(out + "/snap_000050_c0.fpde"));
  CHECK(fs::exists(out + "/snap_000000_c0.pgm"));
  const std::string manifest = slurp(out + "/manifest.txt");
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("seed 3") != std::string::npos);
  CHECK(manifest.find("heatmap snap_000000_c0.pgm min=") != std::string::npos);

  const std::string csv = slurp(out + "/diagnostics.csv");
  CHECK(csv.rfind("time,sup_norm,l2_norm,holder_half\n", 0) == 0);

  // inspect on an emitted snapshot
  CHECK(app::inspect(out + "/snap_000000_c0.fpde") == app::exit_ok);
  CHECK(app::inspect(out + "/manifest.txt") == app::exit_config);
}

TEST_CASE("run_scenario: sqg preset emits a nonincreasing sup-norm column") {
  TempDir dir;
  const std::string out = dir / "out_sqg";
  const std::string cfg = dir / "sqg.conf";
  write_file(cfg,
             "[scenario]\nsolver = quasilinear\npreset = sqg\nic = coscos\nseed = 1\n"
             "[grid]\ndim = 2\nn = 32\nperiod = 6.283185307179586\n"
             "[stepper]\nscheme = heun\ndt = 4e-3\nt_end = 0.1\nsnapshot_stride = 5\n"
             "[output]\ndir = " + out + "\nemit = csv\n");
  REQUIRE(app::run_scenario(cfg) == app::exit_ok);
  std::ifstream in(out + "/diagnostics.csv");
  std::string line;
  std::getline(in, line);
  REQUIRE(line.rfind("time,sup_norm", 0) == 0);
  double prev = std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double sup = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(sup <= prev + 1e-9);
    prev = sup;
  }
}

TEST_CASE("run_scenario: fully-nonlinear preset includes the h-residual column") {
  TempDir dir;
  const std::string out = dir / "out_fn";
  const std::string cfg = dir / "fn.conf";
  write_file(cfg,
             "[scenario]\nsolver = fully-nonlinear\npreset = reaction\nic = cosx\n"
             "[grid]\ndim = 1\nn = 64\nperiod = 6.283185307179586\n"
             "[stepper]\nscheme = heun\ndt = 2e-3\nt_end = 0.1\nsnapshot_stride = 10\n"
             "[output]\ndir = " + out + "\nemit = csv\n");
  REQUIRE(app::run_scenario(cfg) == app::exit_ok);
  const std::string csv = slurp(out + "/diagnostics.csv");
  CHECK(csv.rfind("time,sup_norm,l2_norm,holder_half,h_residual\n", 0) == 0);
}

TEST_CASE("identical config and seed give bit-identical diagnostics") {
  TempDir dir;
  auto run = [&](const std::string& out) {
    const std::string cfg = dir / ("det_" + out + ".conf");
    write_file(cfg,
               "[scenario]\nsolver = quasilinear\npreset = sqg\nic = random\nseed = 99\n"
               "[grid]\ndim = 2\nn = 32\nperiod = 6.283185307179586\n"
               "[stepper]\nscheme = heun\ndt = 4e-3\nt_end = 0.1\nsnapshot_stride = 5\n"
               "[output]\ndir = " + (dir / out) + "\nemit = csv,snapshots\n");
    REQUIRE(app::run_scenario(cfg) == app::exit_ok);
  };
  run("det_a");
  run("det_b");
  CHECK(slurp(dir / "det_a/diagnostics.csv") == slurp(dir / "det_b/diagnostics.csv"));
  CHECK(slurp(dir / "det_a/snap_000000_c0.fpde") == slurp(dir / "det_b/snap_000000_c0.fpde"));
}

TEST_CASE("output root override is honored") {
  TempDir dir;
  const std::string cfg = dir / "root.conf";
  write_file(cfg,
             "[scenario]\nsolver = linear\npreset = const-coeff\nic = cosx\n"
             "[grid]\ndim = 1\nn = 32\nperiod = 6.283185307179586\n"
             "[stepper]\ndt = 5e-3\nt_end = 0.05\n"
             "[output]\ndir = nested/out\nemit = csv\n");
  ::setenv("FPDE_OUT_ROOT", dir.path.string().c_str(), 1);
  const int rc = app::run_scenario(cfg);
  ::unsetenv("FPDE_OUT_ROOT");
  REQUIRE(rc == app::exit_ok);
  CHECK(fs::exists(dir / "nested/out/diagnostics.csv"));
}

TEST_CASE("verify driver: io suite passes and the report counts failures") {
  auto results = fpde::verify::run_checks("io");
  REQUIRE_FALSE(results.empty());
  for (const auto& r : results) CHECK(r.pass);

  std::vector<fpde::verify::CheckResult> fake{{"a", true, 0, 0, ""}, {"b", false, 1, 0, ""}};
  FILE* sink = std::fopen("/dev/null", "w");
  CHECK(fpde::verify::report(fake, sink) == 1);
  std::fclose(sink);
}

TEST_CASE("bench: empty size list yields an empty table; rows are sane") {
  auto rows = fpde::bench::run_bench("multiplier", {});
  CHECK(rows.empty());
  CHECK(fpde::bench::to_csv(rows) == "kernel,n,dim,reps,median_seconds\n");

  auto more = fpde::bench::run_bench("multiplier", {32}, 5);
  REQUIRE(more.size() == 1);
  CHECK(more[0].kernel == "multiplier");
  CHECK(more[0].n == 32);
  CHECK(more[0].median_seconds > 0.0);
  const std::string csv = fpde::bench::to_csv(more);
  CHECK(csv.find("multiplier,32,2,5,") != std::string::npos);
}

TEST_CASE("bench medians are stable between repeated runs") {
  auto a = fpde::bench::run_bench("multiplier", {128}, 9);
  auto b = fpde::bench::run_bench("multiplier", {128}, 9);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  const double lo = std::min(a[0].median_seconds, b[0].median_seconds);
  const double hi = std::max(a[0].median_seconds, b[0].median_seconds);
  CHECK((hi - lo) / lo <= 0.2);
}
