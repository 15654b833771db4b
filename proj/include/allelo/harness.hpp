#ifndef ALLELO_HARNESS_HPP
#define ALLELO_HARNESS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "allelo/coupling.hpp"
#include "allelo/engine.hpp"

namespace allelo {

enum class ExperimentKind {
  kSimulate,
  kMeanfield,
  kBasin,
  kSweepGamma,
  kSweepBeta,
  kGbtCouple,
  kMonoCouple,
  kDualityCheck,
  kAncestorCheck,
  kPercolation,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct SweepOptions {
  double b1_min = 1.0, b1_max = 4.0;
  int b1_steps = 4;
  double ax2_min = 0.0, ax2_max = 2.0;  // gamma or beta2 axis
  int ax2_steps = 5;
  double fixed = 3.0;  // beta2 for the (b1, gamma) plane, gamma otherwise
};

struct CoupleOptions {
  std::string mode = "gamma";  // gamma | beta2
  std::vector<double> values = {0.5, 2.0};
};

struct DualOptions {
  double lookahead = 10.0;
  double pre_window = 0.0;  // log extension below time 0
};

struct BasinOptions {
  int resolution = 101;
  double t_max = 500.0;
};

struct PercOptions {
  int d = 1;
  int n_max = 200;
  int reps = 500;
  std::vector<double> p_list = {0.6, 0.8};
};

// One experiment, serializable to/from a sectioned key = value file.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSimulate;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 0;  // 0: hardware concurrency
  std::string format = "csv";  // csv | ppm

  ModelParams params;
  double p1 = 0.25, p2 = 0.25;
  double horizon = 50.0;
  int replicates = 1;
  int sample_count = 50;
  std::vector<double> snapshot_times;
  bool export_log = false;  // write replicate 0's event log as text

  SweepOptions sweep;
  CoupleOptions couple;
  DualOptions dual;
  BasinOptions basin;
  PercOptions perc;

  std::string to_ini() const;
  static ExperimentConfig from_ini(const std::string& text);
  static ExperimentConfig from_ini_file(const std::filesystem::path& path);
  void validate() const;
  std::uint64_t hash() const;  // FNV-1a over the canonical serialization
  int effective_workers() const;
};

struct RunSummary {
  ExperimentKind kind;
  long violations = 0;        // coupling order / duality disagreements
  bool resource_capped = false;
  std::vector<std::string> files;  // outputs, relative to out_dir
  std::string note;
};

// Executes the experiment, writing outputs plus a manifest into out_dir.
// A failure sentinel file marks any directory whose run threw.
RunSummary run(const ExperimentConfig& config);

struct SweepCell {
  double beta1 = 0.0, beta2 = 0.0, gamma = 0.0;
  long reps = 0;
  std::array<long, 4> outcomes{0, 0, 0, 0};  // by Outcome enum order
};

struct SweepTable {
  int n1 = 0, n2 = 0;  // grid extents (beta1 axis, second axis)
  bool gamma_plane = true;
  std::vector<SweepCell> cells;  // row-major, beta1 major
};

// Win-frequency map over the parameter plane; replicate (cell, r) uses the
// stream make_stream(cell, r), so cells are independent and results do not
// depend on the worker count.
SweepTable phase_sweep(const ExperimentConfig& config);

void write_sweep_csv(std::ostream& os, const SweepTable& table);

// Empirical transition estimate along the second axis of each row: the
// midpoint of the steepest change in species-1 win frequency, with the grid
// spacing as its uncertainty.  These are labeled estimates, nothing more.
struct TransitionEstimate {
  double axis1_value = 0.0;
  double axis2_midpoint = 0.0;
  double uncertainty = 0.0;
  double jump = 0.0;  // win-frequency change across the steepest pair
};

std::vector<TransitionEstimate> transition_estimates(const SweepTable& table);
void write_transitions_csv(std::ostream& os,
                           const std::vector<TransitionEstimate>& rows,
                           bool gamma_plane);

// Pixmaps of one realization at the requested times (d = 2 only).
std::vector<std::string> snapshot_figure(const ExperimentConfig& config,
                                         const std::vector<double>& times);

}  // namespace allelo

#endif
