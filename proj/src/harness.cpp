#include "allelo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "allelo/dual.hpp"
#include "allelo/meanfield.hpp"
#include "allelo/percolation.hpp"
#include "allelo/version.hpp"

namespace allelo {

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kMeanfield: return "meanfield";
    case ExperimentKind::kBasin: return "basin";
    case ExperimentKind::kSweepGamma: return "sweep-gamma";
    case ExperimentKind::kSweepBeta: return "sweep-beta";
    case ExperimentKind::kGbtCouple: return "gbt-couple";
    case ExperimentKind::kMonoCouple: return "mono-couple";
    case ExperimentKind::kDualityCheck: return "duality-check";
    case ExperimentKind::kAncestorCheck: return "ancestor-check";
    case ExperimentKind::kPercolation: return "percolation";
  }
  return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kSimulate, ExperimentKind::kMeanfield,
        ExperimentKind::kBasin, ExperimentKind::kSweepGamma,
        ExperimentKind::kSweepBeta, ExperimentKind::kGbtCouple,
        ExperimentKind::kMonoCouple, ExperimentKind::kDualityCheck,
        ExperimentKind::kAncestorCheck, ExperimentKind::kPercolation})
    if (name == kind_name(k)) return k;
  throw ConfigError("unknown experiment kind: " + name);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string ExperimentConfig::to_ini() const {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "kind = " << kind_name(kind) << "\n";
  os << "seed = " << seed << "\n";
  os << "out = " << out_dir << "\n";
  os << "workers = " << workers << "\n";
  os << "format = " << format << "\n";
  os << "\n[model]\n";
  os << "beta1 = " << fmt(params.beta1) << "\n";
  os << "beta2 = " << fmt(params.beta2) << "\n";
  os << "gamma = " << fmt(params.gamma) << "\n";
  os << "range = " << fmt(params.range) << "\n";
  os << "dim = " << params.dim << "\n";
  os << "side = " << params.side << "\n";
  os << "\n[run]\n";
  os << "p1 = " << fmt(p1) << "\n";
  os << "p2 = " << fmt(p2) << "\n";
  os << "horizon = " << fmt(horizon) << "\n";
  os << "replicates = " << replicates << "\n";
  os << "samples = " << sample_count << "\n";
  os << "snapshots = " << fmt_list(snapshot_times) << "\n";
  os << "export_log = " << (export_log ? 1 : 0) << "\n";
  os << "\n[sweep]\n";
  os << "b1_min = " << fmt(sweep.b1_min) << "\n";
  os << "b1_max = " << fmt(sweep.b1_max) << "\n";
  os << "b1_steps = " << sweep.b1_steps << "\n";
  os << "ax2_min = " << fmt(sweep.ax2_min) << "\n";
  os << "ax2_max = " << fmt(sweep.ax2_max) << "\n";
  os << "ax2_steps = " << sweep.ax2_steps << "\n";
  os << "fixed = " << fmt(sweep.fixed) << "\n";
  os << "\n[couple]\n";
  os << "mode = " << couple.mode << "\n";
  os << "values = " << fmt_list(couple.values) << "\n";
  os << "\n[dual]\n";
  os << "lookahead = " << fmt(dual.lookahead) << "\n";
  os << "pre_window = " << fmt(dual.pre_window) << "\n";
  os << "\n[basin]\n";
  os << "resolution = " << basin.resolution << "\n";
  os << "t_max = " << fmt(basin.t_max) << "\n";
  os << "\n[perc]\n";
  os << "pdim = " << perc.d << "\n";
  os << "n_max = " << perc.n_max << "\n";
  os << "reps = " << perc.reps << "\n";
  os << "p_list = " << fmt_list(perc.p_list) << "\n";
  return os.str();
}

ExperimentConfig ExperimentConfig::from_ini(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not key = value: " + t);
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    auto bad_key = [&]() {
      throw ConfigError("unknown config key [" + section + "] " + key);
    };
    if (section == "experiment") {
      if (key == "kind") cfg.kind = kind_from_name(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "out") cfg.out_dir = val;
      else if (key == "workers") cfg.workers = std::stoi(val);
      else if (key == "format") cfg.format = val;
      else bad_key();
    } else if (section == "model") {
      if (key == "beta1") cfg.params.beta1 = std::stod(val);
      else if (key == "beta2") cfg.params.beta2 = std::stod(val);
      else if (key == "gamma") cfg.params.gamma = std::stod(val);
      else if (key == "range") cfg.params.range = std::stod(val);
      else if (key == "dim") cfg.params.dim = std::stoi(val);
      else if (key == "side") cfg.params.side = std::stol(val);
      else bad_key();
    } else if (section == "run") {
      if (key == "p1") cfg.p1 = std::stod(val);
      else if (key == "p2") cfg.p2 = std::stod(val);
      else if (key == "horizon") cfg.horizon = std::stod(val);
      else if (key == "replicates") cfg.replicates = std::stoi(val);
      else if (key == "samples") cfg.sample_count = std::stoi(val);
      else if (key == "snapshots") cfg.snapshot_times = parse_list(val);
      else if (key == "export_log") cfg.export_log = std::stoi(val) != 0;
      else bad_key();
    } else if (section == "sweep") {
      if (key == "b1_min") cfg.sweep.b1_min = std::stod(val);
      else if (key == "b1_max") cfg.sweep.b1_max = std::stod(val);
      else if (key == "b1_steps") cfg.sweep.b1_steps = std::stoi(val);
      else if (key == "ax2_min") cfg.sweep.ax2_min = std::stod(val);
      else if (key == "ax2_max") cfg.sweep.ax2_max = std::stod(val);
      else if (key == "ax2_steps") cfg.sweep.ax2_steps = std::stoi(val);
      else if (key == "fixed") cfg.sweep.fixed = std::stod(val);
      else bad_key();
    } else if (section == "couple") {
      if (key == "mode") cfg.couple.mode = val;
      else if (key == "values") cfg.couple.values = parse_list(val);
      else bad_key();
    } else if (section == "dual") {
      if (key == "lookahead") cfg.dual.lookahead = std::stod(val);
      else if (key == "pre_window") cfg.dual.pre_window = std::stod(val);
      else bad_key();
    } else if (section == "basin") {
      if (key == "resolution") cfg.basin.resolution = std::stoi(val);
      else if (key == "t_max") cfg.basin.t_max = std::stod(val);
      else bad_key();
    } else if (section == "perc") {
      if (key == "pdim") cfg.perc.d = std::stoi(val);
      else if (key == "n_max") cfg.perc.n_max = std::stoi(val);
      else if (key == "reps") cfg.perc.reps = std::stoi(val);
      else if (key == "p_list") cfg.perc.p_list = parse_list(val);
      else bad_key();
    } else {
      throw ConfigError("unknown config section [" + section + "]");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_ini_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_ini(ss.str());
}

void ExperimentConfig::validate() const {
  params.validate();
  if (p1 < 0.0 || p2 < 0.0 || p1 + p2 > 1.0)
    throw ConfigError("initial densities need p1, p2 >= 0 and p1 + p2 <= 1");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (sample_count < 1) throw ConfigError("samples must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (format != "csv" && format != "ppm")
    throw ConfigError("format must be csv or ppm");
  if (kind == ExperimentKind::kMonoCouple) {
    if (couple.mode != "gamma" && couple.mode != "beta2")
      throw ConfigError("couple mode must be gamma or beta2");
    if (couple.values.size() < 2)
      throw ConfigError("couple values needs at least two entries");
    if (!std::is_sorted(couple.values.begin(), couple.values.end()))
      throw ConfigError("couple values must be nondecreasing");
  }
  if (kind == ExperimentKind::kGbtCouple && params.gamma > params.beta1)
    throw ConfigError("gbt coupling requires gamma <= beta1");
  if ((kind == ExperimentKind::kDualityCheck ||
       kind == ExperimentKind::kAncestorCheck) &&
      params.gamma != 0.0)
    throw ConfigError("dual checks require gamma = 0");
  if (kind == ExperimentKind::kSweepGamma ||
      kind == ExperimentKind::kSweepBeta) {
    if (sweep.b1_steps < 1 || sweep.ax2_steps < 1)
      throw ConfigError("sweep grid must be nonempty");
  }
  if (kind == ExperimentKind::kBasin && basin.resolution < 2)
    throw ConfigError("basin resolution must be >= 2");
  if (kind == ExperimentKind::kPercolation) {
    if (perc.reps < 1) throw ConfigError("perc reps must be >= 1");
    for (double p : perc.p_list)
      if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("perc probabilities must lie in [0,1]");
  }
}

std::uint64_t ExperimentConfig::hash() const {
  std::string s = to_ini();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int ExperimentConfig::effective_workers() const {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Collects output files and writes the manifest (or a failure sentinel).
class OutputDir {
 public:
  explicit OutputDir(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  std::ofstream open(const std::string& name, bool binary = false) {
    files_.push_back(name);
    std::ofstream os(dir_ / name,
                     binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot write output file " + name);
    return os;
  }

  void write_manifest(const ExperimentConfig& cfg, const std::string& note) {
    std::ofstream os(dir_ / "manifest.txt");
    os << "version = " << kVersion << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    os << "config_hash = " << buf << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "kind = " << kind_name(cfg.kind) << "\n";
    if (!note.empty()) os << "note = " << note << "\n";
    for (const std::string& f : files_) os << "file = " << f << "\n";
  }

  void write_failure(const std::string& message) {
    std::ofstream os(dir_ / "FAILED");
    os << message << "\n";
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

void run_simulate(const ExperimentConfig& cfg, OutputDir& out,
                  RunSummary& summary) {
  SampleSpec samples = uniform_samples(cfg.horizon, cfg.sample_count);
  samples.snapshot_times = cfg.snapshot_times;

  std::array<long, 4> outcome_counts{0, 0, 0, 0};
  auto summary_csv = out.open("summary.csv");
  summary_csv << "replicate,outcome,extinction_t1,extinction_t2,final_count1,"
                 "final_count2\n";
  for (int r = 0; r < cfg.replicates; ++r) {
    Rng init_rng(cfg.seed, make_stream(1, static_cast<std::uint32_t>(r)));
    SpatialConfig initial =
        sample_initial(cfg.params.side, cfg.params.dim, cfg.p1, cfg.p2,
                       init_rng);
    bool record = cfg.export_log && r == 0;
    SimResult res =
        simulate(initial, cfg.params, cfg.horizon, cfg.seed,
                 make_stream(0, static_cast<std::uint32_t>(r)), samples,
                 record);
    ++outcome_counts[static_cast<int>(res.outcome)];
    if (r == 0) {
      auto os = out.open("densities.csv");
      write_density_csv(os, res.series);
      if (record && res.log) {
        auto lg = out.open("events.txt");
        write_event_log(lg, *res.log);
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%ld,%ld\n", r,
                  outcome_name(res.outcome), res.extinction_time1,
                  res.extinction_time2, res.final_config.counts[1],
                  res.final_config.counts[2]);
    summary_csv << buf;
    for (const auto& [t, snap] : res.series.snapshots) {
      if (cfg.format == "ppm" && cfg.params.dim == 2) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_r%d_t%g.ppm", r, t);
        auto os = out.open(name, true);
        write_ppm(os, snap);
      }
    }
  }
  auto freq = out.open("outcomes.csv");
  freq << "outcome,count,frequency\n";
  for (int o = 0; o < 4; ++o) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s,%ld,%.17g\n",
                  outcome_name(static_cast<Outcome>(o)), outcome_counts[o],
                  static_cast<double>(outcome_counts[o]) / cfg.replicates);
    freq << buf;
  }
  summary.note = "win1=" + std::to_string(outcome_counts[0]) +
                 " win2=" + std::to_string(outcome_counts[1]) +
                 " extinct=" + std::to_string(outcome_counts[2]) +
                 " coexist=" + std::to_string(outcome_counts[3]);
}

void run_meanfield(const ExperimentConfig& cfg, OutputDir& out) {
  FixedPointReport report = classify(cfg.params);
  {
    auto os = out.open("fixed_points.csv");
    write_fixed_point_csv(os, report);
  }
  IntegratorOptions opts;
  opts.store_trace = true;
  opts.trace_dt = cfg.horizon / std::max(1, cfg.sample_count);
  IntegrationResult r =
      integrate({cfg.p1, cfg.p2}, cfg.params, cfg.horizon, opts);
  auto os = out.open("trajectory.csv");
  write_trajectory_csv(os, r);
}

void run_basin(const ExperimentConfig& cfg, OutputDir& out) {
  BasinMap map = basin_map(cfg.params, cfg.basin.resolution, cfg.basin.t_max,
                           cfg.effective_workers());
  {
    auto os = out.open("basin.csv");
    write_basin_csv(os, map);
  }
  auto os = out.open("basin_summary.csv");
  os << "label,interior_area_fraction\n";
  const char* names[4] = {"p0", "p1", "p2", "p12"};
  char buf[64];
  for (int l = 0; l < 4; ++l) {
    std::snprintf(buf, sizeof buf, "%s,%.17g\n", names[l],
                  map.interior_area_fraction[l]);
    os << buf;
  }
  os << "undecided," << map.undecided << "\n";
}

void run_couple(const ExperimentConfig& cfg, OutputDir& out,
                RunSummary& summary) {
  SampleSpec samples = uniform_samples(cfg.horizon, cfg.sample_count);
  long violations = 0;
  auto agg = out.open("coupling_runs.csv");
  agg << "replicate,violations";
  bool header_done = false;
  for (int r = 0; r < cfg.replicates; ++r) {
    Rng init_rng(cfg.seed, make_stream(1, static_cast<std::uint32_t>(r)));
    SpatialConfig initial =
        sample_initial(cfg.params.side, cfg.params.dim, cfg.p1, cfg.p2,
                       init_rng);
    CouplingReport rep;
    if (cfg.kind == ExperimentKind::kGbtCouple) {
      rep = couple_gbt(initial, cfg.params, cfg.horizon, cfg.seed,
                       make_stream(0, static_cast<std::uint32_t>(r)), samples);
    } else if (cfg.couple.mode == "gamma") {
      rep = couple_gamma_ladder(initial, cfg.params, cfg.couple.values,
                                cfg.horizon, cfg.seed,
                                make_stream(0, static_cast<std::uint32_t>(r)),
                                samples);
    } else {
      rep = couple_birthrate_ladder(
          initial, cfg.params, cfg.couple.values, cfg.horizon, cfg.seed,
          make_stream(0, static_cast<std::uint32_t>(r)), samples);
    }
    if (!header_done) {
      for (std::size_t j = 0; j < rep.outcomes.size(); ++j)
        agg << ",outcome_p" << j;
      agg << "\n";
      header_done = true;
    }
    violations += rep.violations;
    agg << r << ',' << rep.violations;
    for (Outcome o : rep.outcomes) agg << ',' << outcome_name(o);
    agg << "\n";
    if (r == 0) {
      auto os = out.open("coupling.csv");
      write_coupling_csv(os, rep);
    }
  }
  summary.violations = violations;
  summary.note = "violations=" + std::to_string(violations);
}

void run_dual_checks(const ExperimentConfig& cfg, OutputDir& out,
                     RunSummary& summary) {
  const bool ancestor = cfg.kind == ExperimentKind::kAncestorCheck;
  long disagreements = 0, determined = 0, matched = 0;
  std::vector<double> displacement_norms;
  auto os = out.open(ancestor ? "ancestor_check.csv" : "duality_check.csv");
  os << (ancestor ? "replicate,sites,determined,matched,extinct_vacant_ok\n"
                  : "replicate,sites,agreements\n");
  TorusGeometry geom(cfg.params.dim, cfg.params.side);
  for (int r = 0; r < cfg.replicates; ++r) {
    Rng init_rng(cfg.seed, make_stream(1, static_cast<std::uint32_t>(r)));
    SpatialConfig initial =
        sample_initial(cfg.params.side, cfg.params.dim, cfg.p1, cfg.p2,
                       init_rng);
    EventLog log = generate_events_window(
        cfg.params, -cfg.dual.pre_window, cfg.horizon, cfg.seed,
        make_stream(0, static_cast<std::uint32_t>(r)));
    // forward state at the horizon under the symmetric rules
    SpatialConfig fwd = initial;
    for (const GraphEvent& e : log.events)
      if (e.time > 0.0) apply_event_symmetric(fwd, e);

    long agreements = 0, det_r = 0, match_r = 0;
    bool extinct_vacant_ok = true;
    for (long x = 0; x < geom.n_sites; ++x) {
      if (!ancestor) {
        DualityCheck c = check_duality(initial, log, x, cfg.horizon);
        if (c.agree) ++agreements;
        else ++disagreements;
      } else {
        AncestorPath path = first_ancestor(log, x, cfg.horizon);
        if (!path.alive) {
          if (fwd.at(x) != kEmpty) extinct_vacant_ok = false;
          continue;
        }
        std::optional<int> predicted =
            type_via_first_ancestor(initial, log, x, cfg.horizon);
        if (predicted) {
          ++det_r;
          if (static_cast<int>(fwd.at(x)) == *predicted) ++match_r;
        }
      }
    }
    if (!ancestor) {
      os << r << ',' << geom.n_sites << ',' << agreements << "\n";
    } else {
      determined += det_r;
      matched += match_r;
      if (!extinct_vacant_ok) ++disagreements;
      os << r << ',' << geom.n_sites << ',' << det_r << ',' << match_r << ','
         << (extinct_vacant_ok ? 1 : 0) << "\n";
      disagreements += det_r - match_r;
      AncestorPath path = first_ancestor(log, 0, cfg.horizon);
      RenewalScan scan = renewal_scan(path, log, cfg.dual.lookahead);
      for (const auto& [move, dt] : scan.displacements) {
        double n2 = dt * dt;
        for (int v : move) n2 += static_cast<double>(v) * v;
        displacement_norms.push_back(std::sqrt(n2));
      }
      if (r == 0) {
        auto pcsv = out.open("ancestor_path.csv");
        write_ancestor_csv(pcsv, path, geom, &scan);
      }
    }
  }
  summary.violations = disagreements;
  summary.note = ancestor ? "determined=" + std::to_string(determined) +
                                " matched=" + std::to_string(matched)
                          : "disagreements=" + std::to_string(disagreements);
  if (ancestor) {
    // tail decay of the inter-renewal displacements: least-squares slope of
    // log survival against the norm (reported, not asserted)
    std::sort(displacement_norms.begin(), displacement_norms.end());
    double rate = 0.0;
    std::size_t n = displacement_norms.size();
    if (n >= 3) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double x = displacement_norms[i];
        double y = std::log(static_cast<double>(n - i) / n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      double denom = n * sxx - sx * sx;
      if (denom > 0) rate = -(n * sxy - sx * sy) / denom;
    }
    auto fit = out.open("renewal_tail.csv");
    fit << "displacements,exp_tail_rate\n"
        << n << ',' << rate << "\n";
  }
}

void run_percolation(const ExperimentConfig& cfg, OutputDir& out) {
  std::vector<ThetaEstimate> rows;
  for (std::size_t i = 0; i < cfg.perc.p_list.size(); ++i)
    rows.push_back(estimate_theta(cfg.perc.p_list[i], cfg.perc.d,
                                  cfg.perc.n_max, cfg.perc.reps, cfg.seed));
  auto os = out.open("theta.csv");
  write_theta_csv(os, rows);
}

}  // namespace

SweepTable phase_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const SweepOptions& sw = cfg.sweep;
  SweepTable table;
  table.n1 = sw.b1_steps;
  table.n2 = sw.ax2_steps;
  table.gamma_plane = cfg.kind != ExperimentKind::kSweepBeta;
  table.cells.resize(static_cast<std::size_t>(table.n1) * table.n2);

  auto axis_value = [](double lo, double hi, int steps, int i) {
    if (steps <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  };

  for (int i = 0; i < table.n1; ++i)
    for (int j = 0; j < table.n2; ++j) {
      SweepCell& cell = table.cells[i * table.n2 + j];
      cell.beta1 = axis_value(sw.b1_min, sw.b1_max, sw.b1_steps, i);
      double ax2 = axis_value(sw.ax2_min, sw.ax2_max, sw.ax2_steps, j);
      if (table.gamma_plane) {
        cell.gamma = ax2;
        cell.beta2 = sw.fixed;
      } else {
        cell.beta2 = ax2;
        cell.gamma = sw.fixed;
      }
      cell.reps = cfg.replicates;
    }

  const long n_cells = static_cast<long>(table.cells.size());
  const long n_tasks = n_cells * cfg.replicates;
  std::vector<Outcome> results(n_tasks);
  std::atomic<long> cursor{0};

  auto worker = [&]() {
    for (;;) {
      long task = cursor.fetch_add(1);
      if (task >= n_tasks) return;
      long cell_idx = task / cfg.replicates;
      int rep = static_cast<int>(task % cfg.replicates);
      const SweepCell& cell = table.cells[cell_idx];
      ModelParams params = cfg.params;
      params.beta1 = cell.beta1;
      params.beta2 = cell.beta2;
      params.gamma = cell.gamma;
      Rng init_rng(cfg.seed,
                   make_stream(static_cast<std::uint32_t>(2 * cell_idx + 1),
                               static_cast<std::uint32_t>(rep)));
      SpatialConfig initial = sample_initial(params.side, params.dim, cfg.p1,
                                             cfg.p2, init_rng);
      SampleSpec samples;  // horizon-only
      SimResult res = simulate(
          initial, params, cfg.horizon, cfg.seed,
          make_stream(static_cast<std::uint32_t>(2 * cell_idx),
                      static_cast<std::uint32_t>(rep)),
          samples);
      results[task] = res.outcome;
    }
  };

  int n_workers = cfg.effective_workers();
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (long task = 0; task < n_tasks; ++task)
    ++table.cells[task / cfg.replicates]
          .outcomes[static_cast<int>(results[task])];
  return table;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << "beta1,beta2,gamma,reps,win1,win2,both_extinct,coexist,"
        "win1_freq,win2_freq\n";
  char buf[256];
  for (const SweepCell& c : table.cells) {
    double w1 = static_cast<double>(c.outcomes[0]) / c.reps;
    double w2 = static_cast<double>(c.outcomes[1]) / c.reps;
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%ld,%ld,%ld,%ld,%ld,%.17g,%.17g\n",
                  c.beta1, c.beta2, c.gamma, c.reps, c.outcomes[0],
                  c.outcomes[1], c.outcomes[2], c.outcomes[3], w1, w2);
    os << buf;
  }
}

std::vector<TransitionEstimate> transition_estimates(const SweepTable& table) {
  std::vector<TransitionEstimate> rows;
  for (int i = 0; i < table.n1; ++i) {
    if (table.n2 < 2) break;
    TransitionEstimate est;
    const SweepCell& first = table.cells[i * table.n2];
    est.axis1_value = first.beta1;
    double best = -1.0;
    for (int j = 0; j + 1 < table.n2; ++j) {
      const SweepCell& a = table.cells[i * table.n2 + j];
      const SweepCell& b = table.cells[i * table.n2 + j + 1];
      double fa = static_cast<double>(a.outcomes[0]) / a.reps;
      double fb = static_cast<double>(b.outcomes[0]) / b.reps;
      double ax_a = table.gamma_plane ? a.gamma : a.beta2;
      double ax_b = table.gamma_plane ? b.gamma : b.beta2;
      if (std::abs(fb - fa) > best) {
        best = std::abs(fb - fa);
        est.axis2_midpoint = (ax_a + ax_b) / 2.0;
        est.uncertainty = std::abs(ax_b - ax_a) / 2.0;
        est.jump = fb - fa;
      }
    }
    if (best >= 0.0) rows.push_back(est);
  }
  return rows;
}

void write_transitions_csv(std::ostream& os,
                           const std::vector<TransitionEstimate>& rows,
                           bool gamma_plane) {
  os << "beta1," << (gamma_plane ? "gamma_c_hat" : "beta2_c_hat")
     << ",uncertainty,win1_freq_jump\n";
  char buf[160];
  for (const TransitionEstimate& e : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", e.axis1_value,
                  e.axis2_midpoint, e.uncertainty, e.jump);
    os << buf;
  }
}

std::vector<std::string> snapshot_figure(const ExperimentConfig& cfg,
                                         const std::vector<double>& times) {
  if (cfg.params.dim != 2)
    throw ConfigError("snapshot figures require d = 2");
  SampleSpec samples;
  samples.snapshot_times = times;
  std::sort(samples.snapshot_times.begin(), samples.snapshot_times.end());
  double horizon = std::max(cfg.horizon, samples.snapshot_times.empty()
                                             ? cfg.horizon
                                             : samples.snapshot_times.back());
  Rng init_rng(cfg.seed, make_stream(1, 0));
  SpatialConfig initial = sample_initial(cfg.params.side, cfg.params.dim,
                                         cfg.p1, cfg.p2, init_rng);
  SimResult res = simulate(initial, cfg.params, horizon, cfg.seed,
                           make_stream(0, 0), samples);
  std::vector<std::string> names;
  OutputDir out(cfg.out_dir);
  for (const auto& [t, snap] : res.series.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_t%g.ppm", t);
    auto os = out.open(name, true);
    write_ppm(os, snap);
    names.push_back(name);
  }
  out.write_manifest(cfg, "snapshot figure");
  return names;
}

RunSummary run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunSummary summary;
  summary.kind = cfg.kind;
  OutputDir out(cfg.out_dir);
  try {
    {
      auto os = out.open("config.ini");
      os << cfg.to_ini();
    }
    switch (cfg.kind) {
      case ExperimentKind::kSimulate:
        run_simulate(cfg, out, summary);
        break;
      case ExperimentKind::kMeanfield:
        run_meanfield(cfg, out);
        break;
      case ExperimentKind::kBasin:
        run_basin(cfg, out);
        break;
      case ExperimentKind::kSweepGamma:
      case ExperimentKind::kSweepBeta: {
        SweepTable table = phase_sweep(cfg);
        {
          auto os = out.open("sweep.csv");
          write_sweep_csv(os, table);
        }
        auto tr = transition_estimates(table);
        auto os = out.open("transitions.csv");
        write_transitions_csv(os, tr, table.gamma_plane);
        break;
      }
      case ExperimentKind::kGbtCouple:
      case ExperimentKind::kMonoCouple:
        run_couple(cfg, out, summary);
        break;
      case ExperimentKind::kDualityCheck:
      case ExperimentKind::kAncestorCheck:
        run_dual_checks(cfg, out, summary);
        break;
      case ExperimentKind::kPercolation:
        run_percolation(cfg, out);
        break;
    }
  } catch (const std::exception& e) {
    out.write_failure(e.what());
    throw;
  }
  out.write_manifest(cfg, summary.note);
  summary.files = out.files();
  return summary;
}

}  // namespace allelo
