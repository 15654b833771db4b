#ifndef ALLELO_COUPLING_HPP
#define ALLELO_COUPLING_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "allelo/engine.hpp"

namespace allelo {

// Joint site state of the allelopathic process (a) and the grass-bush-tree
// process (g: 0 = grass, 1 = tree, 2 = bush).
struct PairState {
  std::uint8_t a = 0;
  std::uint8_t g = 0;
  bool operator==(const PairState&) const = default;
};

// The six pairs closed under the coupled dynamics.
bool pair_in_closed_set(PairState s);

constexpr int kArrowLabel0 = 0;  // kill / tree-birth arrow, rate gamma/N
constexpr int kArrowLabel1 = 1;  // birth arrow, rate (beta1-gamma)/N
constexpr int kArrowLabel2 = 2;  // birth arrow, rate beta2/N
constexpr int kCrossLabel = 3;

// Effect of one arrow (labels 0..2) or cross on the head pair.  Inputs must
// lie in the closed set.  Rule-derived; see gbt_table_mismatches for the
// check against the tabulated form.
PairState gbt_transition(PairState tail, PairState head, int label);

// Number of disagreements between the tabulated transition map and the
// rule-derived one over all 6 x 6 x 4 inputs (0 for a correct build).
int gbt_table_mismatches();

struct CouplingSample {
  double time = 0.0;
  std::vector<std::array<long, 3>> counts;  // per process
};

struct CouplingReport {
  double horizon = 0.0;
  long violations = 0;
  std::optional<GraphEvent> first_violation;
  std::string first_violation_note;
  std::vector<CouplingSample> samples;
  std::vector<Outcome> outcomes;            // per process, at the horizon
  std::vector<double> parameter_values;     // the coupled parameter ladder
};

// Ladder couplings: all processes are driven by a single event stream in
// which the parameter increments appear as extra arrow kinds, so process j
// realizes the model with the j-th parameter value and the sitewise
// orderings hold pathwise.  Ordering checks run after every event at the
// touched site; a nonzero violation count indicates an implementation bug.
CouplingReport couple_gamma_ladder(const SpatialConfig& initial,
                                   const ModelParams& params,
                                   std::vector<double> gammas, double horizon,
                                   std::uint64_t seed, std::uint64_t stream,
                                   const SampleSpec& samples);

CouplingReport couple_birthrate_ladder(const SpatialConfig& initial,
                                       const ModelParams& params,
                                       std::vector<double> beta2s,
                                       double horizon, std::uint64_t seed,
                                       std::uint64_t stream,
                                       const SampleSpec& samples);

// Two-process forms.
CouplingReport couple_gamma(const SpatialConfig& initial,
                            const ModelParams& params, double gamma_lo,
                            double gamma_hi, double horizon,
                            std::uint64_t seed, std::uint64_t stream,
                            const SampleSpec& samples);

CouplingReport couple_birthrate(const SpatialConfig& initial,
                                const ModelParams& params, double beta2_lo,
                                double beta2_hi, double horizon,
                                std::uint64_t seed, std::uint64_t stream,
                                const SampleSpec& samples);

// Coupled (allelopathic, grass-bush-tree) run; requires gamma <= beta1.
// Both coordinates must start sitewise in the closed set; the one-argument
// form starts them equal.
CouplingReport couple_gbt(const SpatialConfig& initial_a,
                          const SpatialConfig& initial_g,
                          const ModelParams& params, double horizon,
                          std::uint64_t seed, std::uint64_t stream,
                          const SampleSpec& samples);

CouplingReport couple_gbt(const SpatialConfig& initial,
                          const ModelParams& params, double horizon,
                          std::uint64_t seed, std::uint64_t stream,
                          const SampleSpec& samples);

// CSV of per-sample counts: t, then count0,count1,count2 per process.
void write_coupling_csv(std::ostream& os, const CouplingReport& report);

}  // namespace allelo

#endif
