#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "allelo/harness.hpp"

using namespace allelo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "allelo_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_simulate(const std::string& out_name) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSimulate;
  cfg.params.beta1 = 2.0;
  cfg.params.beta2 = 3.0;
  cfg.params.gamma = 1.0;
  cfg.params.dim = 1;
  cfg.params.side = 20;
  cfg.horizon = 5.0;
  cfg.replicates = 3;
  cfg.sample_count = 5;
  cfg.seed = 11;
  cfg.out_dir = fresh_dir(out_name).string();
  return cfg;
}

}  // namespace

TEST_CASE("config files round-trip losslessly") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSweepBeta;
  cfg.seed = 987654321123456789ULL;
  cfg.workers = 3;
  cfg.format = "ppm";
  cfg.params.beta1 = 1.2345678901234567;
  cfg.params.beta2 = 0.1 + 0.2;  // not exactly 0.3
  cfg.params.gamma = 1e-9;
  cfg.params.range = 1.5;
  cfg.params.dim = 2;
  cfg.params.side = 37;
  cfg.p1 = 0.123456789;
  cfg.p2 = 1.0 / 3.0;
  cfg.horizon = 123.456;
  cfg.replicates = 17;
  cfg.sample_count = 9;
  cfg.snapshot_times = {1.5, 2.75};
  cfg.sweep.ax2_min = 0.7;
  cfg.couple.values = {0.25, 1.0, 4.0};
  cfg.perc.p_list = {0.3, 0.9};

  ExperimentConfig back = ExperimentConfig::from_ini(cfg.to_ini());
  CHECK(back.to_ini() == cfg.to_ini());
  CHECK(back.params.beta2 == cfg.params.beta2);
  CHECK(back.seed == cfg.seed);
  CHECK(back.snapshot_times == cfg.snapshot_times);
  CHECK(back.hash() == cfg.hash());
}

TEST_CASE("config parsing rejects unknown keys with a diagnostic") {
  CHECK_THROWS_AS(ExperimentConfig::from_ini("[model]\nbeta9 = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_ini("[mystery]\nx = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_ini("[model]\nno equals sign\n"),
                  ConfigError);
  try {
    ExperimentConfig::from_ini("[run]\nhorizons = 5\n");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("horizons") != std::string::npos);
  }
}

TEST_CASE("validation names the violated precondition") {
  ExperimentConfig cfg = tiny_simulate("validate");
  cfg.p1 = 0.9;
  cfg.p2 = 0.9;
  try {
    cfg.validate();
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("p1") != std::string::npos);
  }
  ExperimentConfig dual = tiny_simulate("validate2");
  dual.kind = ExperimentKind::kDualityCheck;
  dual.params.gamma = 0.5;
  CHECK_THROWS_AS(dual.validate(), ConfigError);
}

TEST_CASE("empty initial densities report immediate extinction") {
  ExperimentConfig cfg = tiny_simulate("extinct");
  cfg.p1 = 0.0;
  cfg.p2 = 0.0;
  cfg.replicates = 1;
  RunSummary s = run(cfg);
  std::string summary = slurp(fs::path(cfg.out_dir) / "summary.csv");
  CHECK(summary.find("both_extinct") != std::string::npos);
  std::string outcomes = slurp(fs::path(cfg.out_dir) / "outcomes.csv");
  CHECK(outcomes.find("both_extinct,1,1") != std::string::npos);
}

TEST_CASE("meanfield runs write the interior fixed point") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kMeanfield;
  cfg.params.beta1 = 2.0;
  cfg.params.beta2 = 2.5;
  cfg.params.gamma = 4.0;
  cfg.p1 = 0.4;
  cfg.p2 = 0.05;
  cfg.horizon = 200.0;
  cfg.out_dir = fresh_dir("meanfield").string();
  run(cfg);
  std::string csv = slurp(fs::path(cfg.out_dir) / "fixed_points.csv");
  CHECK(csv.find("p12,defined,0.0625,0.4375") != std::string::npos);
}

TEST_CASE("every output file appears in the manifest and nothing else") {
  ExperimentConfig cfg = tiny_simulate("manifest");
  run(cfg);
  std::set<std::string> listed;
  std::istringstream manifest(slurp(fs::path(cfg.out_dir) / "manifest.txt"));
  std::string line;
  bool have_hash = false, have_seed = false;
  while (std::getline(manifest, line)) {
    if (line.rfind("file = ", 0) == 0) listed.insert(line.substr(7));
    if (line.rfind("config_hash = ", 0) == 0) have_hash = true;
    if (line.rfind("seed = ", 0) == 0) have_seed = true;
  }
  CHECK(have_hash);
  CHECK(have_seed);
  std::set<std::string> present;
  for (const auto& entry : fs::directory_iterator(cfg.out_dir))
    present.insert(entry.path().filename().string());
  CHECK(present.count("manifest.txt") == 1);
  present.erase("manifest.txt");
  CHECK(present == listed);
  CHECK(present.count("FAILED") == 0);
}

TEST_CASE("failed runs leave a sentinel file") {
  ExperimentConfig cfg = tiny_simulate("sentinel");
  cfg.kind = ExperimentKind::kGbtCouple;
  cfg.params.gamma = 5.0;  // exceeds beta1: the coupled run must refuse
  CHECK_THROWS_AS(run(cfg), ConfigError);
  // validate() rejects before any file is written; force a mid-run failure
  ExperimentConfig cfg2 = tiny_simulate("sentinel2");
  cfg2.kind = ExperimentKind::kPercolation;
  cfg2.perc.d = 4;  // grid exceeds the resource cap during the run
  cfg2.perc.n_max = 400;
  CHECK_THROWS_AS(run(cfg2), ResourceCapError);
  CHECK(fs::exists(fs::path(cfg2.out_dir) / "FAILED"));
}

TEST_CASE("identical configs give byte-identical outputs") {
  ExperimentConfig a = tiny_simulate("det_a");
  run(a);
  ExperimentConfig b = tiny_simulate("det_b");
  run(b);
  for (const char* name : {"densities.csv", "summary.csv", "outcomes.csv"})
    CHECK(slurp(fs::path(a.out_dir) / name) ==
          slurp(fs::path(b.out_dir) / name));
}

TEST_CASE("sweeps are worker-count independent") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSweepGamma;
  cfg.params.dim = 1;
  cfg.params.side = 25;
  cfg.horizon = 10.0;
  cfg.replicates = 4;
  cfg.seed = 5;
  cfg.sweep = {2.0, 3.0, 2, 0.0, 1.0, 3, 2.5};
  cfg.out_dir = fresh_dir("sweep_w1").string();
  cfg.workers = 1;
  run(cfg);
  ExperimentConfig cfg4 = cfg;
  cfg4.workers = 4;
  cfg4.out_dir = fresh_dir("sweep_w4").string();
  run(cfg4);
  CHECK(slurp(fs::path(cfg.out_dir) / "sweep.csv") ==
        slurp(fs::path(cfg4.out_dir) / "sweep.csv"));
}

TEST_CASE("a degenerate sweep equals a plain replicate batch") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSweepGamma;
  cfg.params.beta1 = 2.0;
  cfg.params.beta2 = 3.0;
  cfg.params.gamma = 1.0;
  cfg.params.dim = 1;
  cfg.params.side = 20;
  cfg.horizon = 8.0;
  cfg.replicates = 6;
  cfg.seed = 7;
  cfg.sweep = {2.0, 2.0, 1, 1.0, 1.0, 1, 3.0};
  SweepTable table = phase_sweep(cfg);
  REQUIRE(table.cells.size() == 1);
  const SweepCell& cell = table.cells[0];
  CHECK(cell.beta1 == 2.0);
  CHECK(cell.gamma == 1.0);
  CHECK(cell.beta2 == 3.0);

  // replicate the batch by hand with the same streams
  std::array<long, 4> expect{0, 0, 0, 0};
  for (int r = 0; r < 6; ++r) {
    ModelParams p = cfg.params;
    p.beta1 = 2.0;
    p.gamma = 1.0;
    Rng init_rng(cfg.seed, make_stream(1, r));
    SpatialConfig initial = sample_initial(20, 1, cfg.p1, cfg.p2, init_rng);
    SimResult res =
        simulate(initial, p, 8.0, cfg.seed, make_stream(0, r), SampleSpec{});
    ++expect[static_cast<int>(res.outcome)];
  }
  CHECK(cell.outcomes == expect);
}

TEST_CASE("sweep monotonicity: more interference favors species 1") {
  // two-cell gamma column at fixed birth rates with shared replicate seeds
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSweepGamma;
  cfg.params.dim = 1;
  cfg.params.side = 40;
  cfg.horizon = 30.0;
  cfg.replicates = 24;
  cfg.seed = 19;
  cfg.p1 = 0.3;
  cfg.p2 = 0.3;
  cfg.sweep = {3.0, 3.0, 1, 0.0, 3.0, 2, 3.0};
  SweepTable table = phase_sweep(cfg);
  REQUIRE(table.cells.size() == 2);
  // directional check only; cells use independent streams
  double lo = static_cast<double>(table.cells[0].outcomes[0]);
  double hi = static_cast<double>(table.cells[1].outcomes[0]);
  CHECK(hi >= lo - 4.0);  // allow Monte Carlo slack at 24 replicates
}

TEST_CASE("without interference the faster species wins the sweep cells") {
  // gamma = 0 plane, beta1 well above beta2: species 1 should win at least
  // as often as species 2 in every cell
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSweepBeta;
  cfg.params.dim = 1;
  cfg.params.side = 30;
  cfg.horizon = 40.0;
  cfg.replicates = 12;
  cfg.seed = 29;
  cfg.p1 = 0.3;
  cfg.p2 = 0.3;
  cfg.sweep = {4.0, 4.5, 2, 2.0, 2.0, 1, 0.0};  // beta2 = 2 fixed, gamma = 0
  SweepTable table = phase_sweep(cfg);
  for (const SweepCell& c : table.cells) {
    CHECK(c.gamma == 0.0);
    CHECK(c.outcomes[0] >= c.outcomes[1]);
  }
}

TEST_CASE("transition estimates find the steepest step") {
  SweepTable table;
  table.n1 = 1;
  table.n2 = 4;
  table.gamma_plane = true;
  for (int j = 0; j < 4; ++j) {
    SweepCell c;
    c.beta1 = 2.0;
    c.beta2 = 3.0;
    c.gamma = j;
    c.reps = 10;
    c.outcomes = {j >= 2 ? 10L : 0L, 0, 0, j >= 2 ? 0L : 10L};
    table.cells.push_back(c);
  }
  auto est = transition_estimates(table);
  REQUIRE(est.size() == 1);
  CHECK(est[0].axis2_midpoint == doctest::Approx(1.5));
  CHECK(est[0].uncertainty == doctest::Approx(0.5));
  CHECK(est[0].jump == doctest::Approx(1.0));
}

TEST_CASE("snapshot figures require two dimensions and match L x L") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kSimulate;
  cfg.params.dim = 2;
  cfg.params.side = 16;
  cfg.params.beta1 = 4.0;
  cfg.params.beta2 = 3.0;
  cfg.params.gamma = 1.0;
  cfg.horizon = 3.0;
  cfg.out_dir = fresh_dir("snap").string();
  auto names = snapshot_figure(cfg, {1.0, 3.0});
  REQUIRE(names.size() == 2);
  std::string ppm = slurp(fs::path(cfg.out_dir) / names[0]);
  CHECK(ppm.rfind("P6\n16 16\n255\n", 0) == 0);
  CHECK(ppm.size() == 13 + 3 * 16 * 16);

  ExperimentConfig bad = cfg;
  bad.params.dim = 1;
  bad.params.side = 64;
  CHECK_THROWS_AS(snapshot_figure(bad, {1.0}), ConfigError);
}

TEST_CASE("dual and ancestor harness runs complete cleanly") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kDualityCheck;
  cfg.params.beta1 = 4.0;
  cfg.params.beta2 = 4.0;
  cfg.params.gamma = 0.0;
  cfg.params.dim = 1;
  cfg.params.side = 15;
  cfg.horizon = 4.0;
  cfg.replicates = 20;
  cfg.p1 = 0.15;
  cfg.p2 = 0.15;
  cfg.seed = 3;
  cfg.out_dir = fresh_dir("dual").string();
  RunSummary s = run(cfg);
  CHECK(s.violations == 0);

  cfg.kind = ExperimentKind::kAncestorCheck;
  cfg.out_dir = fresh_dir("ancestor").string();
  cfg.dual.lookahead = 2.0;
  cfg.dual.pre_window = 5.0;
  RunSummary s2 = run(cfg);
  CHECK(s2.violations == 0);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "ancestor_path.csv"));
}

TEST_CASE("percolation harness writes the theta table") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kPercolation;
  cfg.perc.p_list = {0.0, 1.0};
  cfg.perc.n_max = 30;
  cfg.perc.reps = 40;
  cfg.out_dir = fresh_dir("perc").string();
  run(cfg);
  std::string csv = slurp(fs::path(cfg.out_dir) / "theta.csv");
  CHECK(csv.find("\n0,40,30,0,") != std::string::npos);
  CHECK(csv.find("\n1,40,30,1,") != std::string::npos);
}

TEST_CASE("sweep cells use disjoint replicate streams") {
  std::set<std::uint64_t> streams;
  for (std::uint32_t cell = 0; cell < 20; ++cell)
    for (std::uint32_t rep = 0; rep < 10; ++rep) {
      streams.insert(make_stream(2 * cell, rep));
      streams.insert(make_stream(2 * cell + 1, rep));
    }
  CHECK(streams.size() == 400);
}
