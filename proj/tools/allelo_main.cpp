#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "allelo/acceptance.hpp"
#include "allelo/harness.hpp"
#include "allelo/version.hpp"

using namespace allelo;

namespace {

struct CliState {
  std::string config_path;
  ExperimentConfig cfg;
  bool have_seed = false;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = -1;
  std::string format;
};

void apply_common(CliState& st) {
  if (!st.config_path.empty())
    st.cfg = ExperimentConfig::from_ini_file(st.config_path);
  if (st.have_seed) st.cfg.seed = st.seed;
  if (!st.out_dir.empty()) st.cfg.out_dir = st.out_dir;
  if (st.workers >= 0) st.cfg.workers = st.workers;
  if (!st.format.empty()) st.cfg.format = st.format;
}

int run_and_report(const ExperimentConfig& cfg) {
  RunSummary summary = run(cfg);
  std::printf("%s: wrote %zu files to %s%s%s\n", kind_name(summary.kind),
              summary.files.size(), cfg.out_dir.c_str(),
              summary.note.empty() ? "" : " | ", summary.note.c_str());
  if (summary.violations > 0) {
    std::fprintf(stderr, "invariant violations detected: %ld\n",
                 summary.violations);
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"allelo: exact stochastic simulator and analysis toolkit for "
               "a two-species inhibitory lattice model"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CliState st;
  app.add_option("--config", st.config_path, "experiment config file");
  auto* seed_opt = app.add_option("--seed", st.seed, "RNG seed");
  app.add_option("--out", st.out_dir, "output directory");
  app.add_option("--workers", st.workers, "worker threads (0 = all cores)");
  app.add_option("--format", st.format, "output format: csv or ppm");

  // model/run overrides shared by the simulation-flavored subcommands
  double beta1 = -1, beta2 = -1, gamma = -1, range = -1, horizon = -1;
  double p1 = -1, p2 = -1;
  long side = -1;
  int dim = -1, replicates = -1, samples = -1;
  auto add_model_flags = [&](CLI::App* sub) {
    sub->add_option("--beta1", beta1, "birth rate of species 1");
    sub->add_option("--beta2", beta2, "birth rate of species 2");
    sub->add_option("--gamma", gamma, "inhibition strength");
    sub->add_option("--range", range, "dispersal range M");
    sub->add_option("--dim", dim, "lattice dimension");
    sub->add_option("--side", side, "torus side length");
    sub->add_option("--horizon", horizon, "time horizon");
    sub->add_option("--p1", p1, "initial density of species 1");
    sub->add_option("--p2", p2, "initial density of species 2");
    sub->add_option("--replicates", replicates, "replicate count");
    sub->add_option("--samples", samples, "sample-time count");
  };
  auto apply_model_flags = [&](ExperimentConfig& cfg) {
    if (beta1 >= 0) cfg.params.beta1 = beta1;
    if (beta2 >= 0) cfg.params.beta2 = beta2;
    if (gamma >= 0) cfg.params.gamma = gamma;
    if (range > 0) cfg.params.range = range;
    if (dim > 0) cfg.params.dim = dim;
    if (side > 0) cfg.params.side = side;
    if (horizon > 0) cfg.horizon = horizon;
    if (p1 >= 0) cfg.p1 = p1;
    if (p2 >= 0) cfg.p2 = p2;
    if (replicates > 0) cfg.replicates = replicates;
    if (samples > 0) cfg.sample_count = samples;
  };

  auto* sim = app.add_subcommand("simulate", "run the lattice process");
  add_model_flags(sim);
  std::vector<double> snapshot_times;
  sim->add_option("--snapshots", snapshot_times,
                  "times at which to store snapshots");
  bool export_log = false;
  sim->add_flag("--export-log", export_log,
                "write replicate 0's event log as text");

  auto* mf = app.add_subcommand("meanfield", "fixed points and a trajectory");
  add_model_flags(mf);

  auto* basin = app.add_subcommand("basin", "basin-of-attraction map");
  add_model_flags(basin);
  int resolution = -1;
  double basin_tmax = -1;
  basin->add_option("--resolution", resolution, "grid nodes per axis");
  basin->add_option("--tmax", basin_tmax, "integration horizon");

  auto* sweep = app.add_subcommand("sweep", "parameter-plane outcome map");
  add_model_flags(sweep);
  std::string plane = "gamma";
  double b1_min = -1, b1_max = -1, ax2_min = -1, ax2_max = -1, fixed = -1;
  int b1_steps = -1, ax2_steps = -1;
  sweep->add_option("--plane", plane, "second axis: gamma or beta2");
  sweep->add_option("--b1-min", b1_min, "beta1 axis start");
  sweep->add_option("--b1-max", b1_max, "beta1 axis end");
  sweep->add_option("--b1-steps", b1_steps, "beta1 axis cells");
  sweep->add_option("--ax2-min", ax2_min, "second axis start");
  sweep->add_option("--ax2-max", ax2_max, "second axis end");
  sweep->add_option("--ax2-steps", ax2_steps, "second axis cells");
  sweep->add_option("--fixed", fixed, "value of the non-swept parameter");

  auto* couple = app.add_subcommand("couple", "shared-log coupled runs");
  add_model_flags(couple);
  std::string mode;
  std::vector<double> values;
  couple->add_option("--mode", mode, "gamma | beta2 | gbt");
  couple->add_option("--values", values, "parameter ladder (nondecreasing)");

  auto* dual = app.add_subcommand("dual", "duality and ancestor checks");
  add_model_flags(dual);
  std::string check = "duality";
  double lookahead = -1, pre_window = -1;
  dual->add_option("--check", check, "duality | ancestor");
  dual->add_option("--lookahead", lookahead, "renewal lookahead window");
  dual->add_option("--pre-window", pre_window, "log extension below time 0");

  auto* perc = app.add_subcommand("perc", "oriented site percolation");
  std::vector<double> p_list;
  int n_max = -1, reps = -1, pdim = -1;
  perc->add_option("--p", p_list, "open-site probabilities");
  perc->add_option("--n-max", n_max, "levels");
  perc->add_option("--reps", reps, "replicates per probability");
  perc->add_option("--pdim", pdim, "spatial dimension of the lattice");

  auto* accept = app.add_subcommand("accept", "run the verification suite");
  std::vector<int> only;
  accept->add_option("--only", only, "criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    st.have_seed = seed_opt->count() > 0;
    apply_common(st);
    ExperimentConfig cfg = st.cfg;

    if (app.got_subcommand(accept)) {
      AcceptanceOptions opts;
      opts.only = only;
      opts.workers = cfg.workers;
      opts.seed = st.have_seed ? st.seed : opts.seed;
      opts.out_dir = cfg.out_dir == "out" ? "accept_out" : cfg.out_dir;
      auto results = run_acceptance(opts);
      return report_acceptance(results) ? kExitOk : kExitFailure;
    }

    apply_model_flags(cfg);
    if (app.got_subcommand(sim)) {
      cfg.kind = ExperimentKind::kSimulate;
      if (!snapshot_times.empty()) cfg.snapshot_times = snapshot_times;
      if (export_log) cfg.export_log = true;
    } else if (app.got_subcommand(mf)) {
      cfg.kind = ExperimentKind::kMeanfield;
    } else if (app.got_subcommand(basin)) {
      cfg.kind = ExperimentKind::kBasin;
      if (resolution > 0) cfg.basin.resolution = resolution;
      if (basin_tmax > 0) cfg.basin.t_max = basin_tmax;
    } else if (app.got_subcommand(sweep)) {
      cfg.kind = plane == "beta2" ? ExperimentKind::kSweepBeta
                                  : ExperimentKind::kSweepGamma;
      if (b1_min >= 0) cfg.sweep.b1_min = b1_min;
      if (b1_max >= 0) cfg.sweep.b1_max = b1_max;
      if (b1_steps > 0) cfg.sweep.b1_steps = b1_steps;
      if (ax2_min >= 0) cfg.sweep.ax2_min = ax2_min;
      if (ax2_max >= 0) cfg.sweep.ax2_max = ax2_max;
      if (ax2_steps > 0) cfg.sweep.ax2_steps = ax2_steps;
      if (fixed >= 0) cfg.sweep.fixed = fixed;
    } else if (app.got_subcommand(couple)) {
      if (mode == "gbt") {
        cfg.kind = ExperimentKind::kGbtCouple;
      } else {
        cfg.kind = ExperimentKind::kMonoCouple;
        if (!mode.empty()) cfg.couple.mode = mode;
      }
      if (!values.empty()) cfg.couple.values = values;
    } else if (app.got_subcommand(dual)) {
      cfg.kind = check == "ancestor" ? ExperimentKind::kAncestorCheck
                                     : ExperimentKind::kDualityCheck;
      if (lookahead >= 0) cfg.dual.lookahead = lookahead;
      if (pre_window >= 0) cfg.dual.pre_window = pre_window;
    } else if (app.got_subcommand(perc)) {
      cfg.kind = ExperimentKind::kPercolation;
      if (!p_list.empty()) cfg.perc.p_list = p_list;
      if (n_max > 0) cfg.perc.n_max = n_max;
      if (reps > 0) cfg.perc.reps = reps;
      if (pdim > 0) cfg.perc.d = pdim;
    }
    return run_and_report(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const ResourceCapError& e) {
    std::fprintf(stderr, "resource cap: %s\n", e.what());
    return kExitResourceCap;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
