#include "allelo/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace allelo {

bool pair_in_closed_set(PairState s) {
  // a = 1 forces g = 1, and g = 2 forces a = 2
  if (s.a > 2 || s.g > 2) return false;
  if (s.a == 1 && s.g != 1) return false;
  if (s.g == 2 && s.a != 2) return false;
  return true;
}

PairState gbt_transition(PairState tail, PairState head, int label) {
  if (!pair_in_closed_set(tail) || !pair_in_closed_set(head))
    throw ConfigError("gbt_transition input outside the closed state set");
  if (label == kCrossLabel) return {0, 0};
  PairState out = head;
  switch (label) {
    case kArrowLabel0:
      if (tail.a == 1) {
        if (head.a == 0) out.a = 1;       // birth through the kill arrow
        else if (head.a == 2) out.a = 0;  // the 2 dies
      }
      if (tail.g == 1 && (head.g == 0 || head.g == 2)) out.g = 1;
      break;
    case kArrowLabel1:
      if (tail.a == 1 && head.a == 0) out.a = 1;
      if (tail.g == 1 && (head.g == 0 || head.g == 2)) out.g = 1;
      break;
    case kArrowLabel2:
      if (tail.a == 2 && head.a == 0) out.a = 2;
      if (tail.g == 2 && head.g == 0) out.g = 2;
      break;
    default:
      throw ConfigError("invalid arrow label");
  }
  return out;
}

namespace {

// The tabulated coupling map: rows where the head pair actually changes,
// everything else is the identity (crosses always give (0,0)).
struct TableRow {
  int label;
  PairState tail, head, after;
};

const TableRow kGbtTable[] = {
    {0, {0, 1}, {0, 0}, {0, 1}}, {0, {0, 1}, {2, 0}, {2, 1}},
    {0, {0, 1}, {2, 2}, {2, 1}}, {0, {1, 1}, {0, 0}, {1, 1}},
    {0, {1, 1}, {0, 1}, {1, 1}}, {0, {1, 1}, {2, 0}, {0, 1}},
    {0, {1, 1}, {2, 1}, {0, 1}}, {0, {1, 1}, {2, 2}, {0, 1}},
    {0, {2, 1}, {0, 0}, {0, 1}}, {0, {2, 1}, {2, 0}, {2, 1}},
    {0, {2, 1}, {2, 2}, {2, 1}},
    {1, {0, 1}, {0, 0}, {0, 1}}, {1, {0, 1}, {2, 0}, {2, 1}},
    {1, {0, 1}, {2, 2}, {2, 1}}, {1, {1, 1}, {0, 0}, {1, 1}},
    {1, {1, 1}, {0, 1}, {1, 1}}, {1, {1, 1}, {2, 0}, {2, 1}},
    {1, {1, 1}, {2, 2}, {2, 1}}, {1, {2, 1}, {0, 0}, {0, 1}},
    {1, {2, 1}, {2, 0}, {2, 1}}, {1, {2, 1}, {2, 2}, {2, 1}},
    {2, {2, 0}, {0, 0}, {2, 0}}, {2, {2, 0}, {0, 1}, {2, 1}},
    {2, {2, 1}, {0, 0}, {2, 0}}, {2, {2, 1}, {0, 1}, {2, 1}},
    {2, {2, 2}, {0, 0}, {2, 2}}, {2, {2, 2}, {0, 1}, {2, 1}},
    {2, {2, 2}, {2, 0}, {2, 2}},
};

PairState table_transition(PairState tail, PairState head, int label) {
  if (label == kCrossLabel) return {0, 0};
  for (const TableRow& row : kGbtTable)
    if (row.label == label && row.tail == tail && row.head == head)
      return row.after;
  return head;
}

const PairState kClosedSet[6] = {{0, 0}, {0, 1}, {1, 1},
                                 {2, 0}, {2, 1}, {2, 2}};

}  // namespace

int gbt_table_mismatches() {
  int bad = 0;
  for (PairState tail : kClosedSet)
    for (PairState head : kClosedSet)
      for (int label : {kArrowLabel0, kArrowLabel1, kArrowLabel2, kCrossLabel})
        if (!(table_transition(tail, head, label) ==
              gbt_transition(tail, head, label)))
          ++bad;
  return bad;
}

namespace {

struct LadderSpec {
  // event kinds: 0 cross, 1 birth1, 2 birth2, 3 kill, then one extra kind
  // per ladder increment starting at index 4
  std::vector<KindSpec> kinds;
  EventKind increment_kind;  // what an increment event means
  int n_processes = 0;
};

CouplingReport run_ladder(const SpatialConfig& initial,
                          const ModelParams& params, const LadderSpec& spec,
                          std::vector<double> values, double horizon,
                          std::uint64_t seed, std::uint64_t stream,
                          const SampleSpec& samples, bool gamma_ladder) {
  params.validate();
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (initial.dim != params.dim || initial.side != params.side)
    throw ConfigError("initial configuration does not match params geometry");

  TorusGeometry geom(params.dim, params.side);
  NeighborhoodTemplate tmpl =
      build_neighborhood(params.dim, params.range, params.side);
  NeighborTable table = build_neighbor_table(geom, tmpl);
  EventStream src(geom, &table, spec.kinds, 0.0, horizon, seed, stream);

  const int k = spec.n_processes;
  std::vector<SpatialConfig> procs(k, initial);

  CouplingReport report;
  report.horizon = horizon;
  report.parameter_values = std::move(values);

  auto ordered_at = [&](long site) -> bool {
    // adjacent processes: 1s grow and 2s shrink along the ladder direction
    for (int j = 0; j + 1 < k; ++j) {
      std::uint8_t lo = procs[j].at(site), hi = procs[j + 1].at(site);
      if (gamma_ladder) {
        if (lo == kInhibitory && hi != kInhibitory) return false;
        if (hi == kSusceptible && lo != kSusceptible) return false;
      } else {
        if (lo == kSusceptible && hi != kSusceptible) return false;
        if (hi == kInhibitory && lo != kInhibitory) return false;
      }
    }
    return true;
  };

  std::size_t next_sample = 0;
  auto record_up_to = [&](double t) {
    while (next_sample < samples.times.size() && samples.times[next_sample] <= t) {
      CouplingSample cs;
      cs.time = samples.times[next_sample];
      for (int j = 0; j < k; ++j) cs.counts.push_back(procs[j].counts);
      report.samples.push_back(std::move(cs));
      ++next_sample;
    }
  };

  RawEvent raw;
  while (src.next(raw)) {
    record_up_to(
        std::nextafter(raw.time, -std::numeric_limits<double>::infinity()));
    GraphEvent e{raw.time, EventKind::kCross, raw.tail, raw.head};
    if (raw.kind < 4) {
      e.kind = static_cast<EventKind>(raw.kind);
      for (int j = 0; j < k; ++j) apply_event(procs[j], e);
    } else {
      e.kind = spec.increment_kind;
      // increment i applies to processes i..k-1
      for (int j = raw.kind - 4; j < k; ++j) apply_event(procs[j], e);
    }
    if (!ordered_at(e.head)) {
      if (report.violations == 0) {
        report.first_violation = e;
        report.first_violation_note = "ordering broken at site " +
                                      std::to_string(e.head) + " at time " +
                                      std::to_string(e.time);
      }
      ++report.violations;
    }
  }
  record_up_to(horizon);

  for (int j = 0; j < k; ++j) {
    long c1 = procs[j].counts[kInhibitory], c2 = procs[j].counts[kSusceptible];
    report.outcomes.push_back(c1 == 0 && c2 == 0 ? Outcome::kBothExtinct
                              : c2 == 0          ? Outcome::kSpecies1Wins
                              : c1 == 0          ? Outcome::kSpecies2Wins
                                                 : Outcome::kCoexistAtHorizon);
  }
  return report;
}

}  // namespace

CouplingReport couple_gamma_ladder(const SpatialConfig& initial,
                                   const ModelParams& params,
                                   std::vector<double> gammas, double horizon,
                                   std::uint64_t seed, std::uint64_t stream,
                                   const SampleSpec& samples) {
  if (gammas.empty()) throw ConfigError("empty gamma ladder");
  if (!std::is_sorted(gammas.begin(), gammas.end()))
    throw ConfigError("gamma ladder must be nondecreasing");
  if (gammas.front() < 0.0) throw ConfigError("gamma must be >= 0");

  LadderSpec spec;
  // kill activity lives entirely in the increment kinds: increment 0 carries
  // gamma_0 and is consumed by every process, increment i the step
  // gamma_i - gamma_{i-1}, consumed by processes i and above
  spec.kinds = {{1.0, false},
                {params.beta1, true},
                {params.beta2, true},
                {0.0, true},
                {gammas.front(), true}};
  for (std::size_t i = 1; i < gammas.size(); ++i)
    spec.kinds.push_back({gammas[i] - gammas[i - 1], true});
  spec.increment_kind = EventKind::kKill;
  spec.n_processes = static_cast<int>(gammas.size());
  return run_ladder(initial, params, spec, std::move(gammas), horizon, seed,
                    stream, samples, true);
}

CouplingReport couple_birthrate_ladder(const SpatialConfig& initial,
                                       const ModelParams& params,
                                       std::vector<double> beta2s,
                                       double horizon, std::uint64_t seed,
                                       std::uint64_t stream,
                                       const SampleSpec& samples) {
  if (beta2s.empty()) throw ConfigError("empty beta2 ladder");
  if (!std::is_sorted(beta2s.begin(), beta2s.end()))
    throw ConfigError("beta2 ladder must be nondecreasing");
  if (beta2s.front() < 0.0) throw ConfigError("beta2 must be >= 0");

  LadderSpec spec;
  spec.kinds = {{1.0, false},
                {params.beta1, true},
                {0.0, true},  // beta2 handled entirely by increments
                {params.gamma, true},
                {beta2s.front(), true}};
  for (std::size_t i = 1; i < beta2s.size(); ++i)
    spec.kinds.push_back({beta2s[i] - beta2s[i - 1], true});
  spec.increment_kind = EventKind::kBirth2;
  spec.n_processes = static_cast<int>(beta2s.size());
  return run_ladder(initial, params, spec, std::move(beta2s), horizon, seed,
                    stream, samples, false);
}

CouplingReport couple_gamma(const SpatialConfig& initial,
                            const ModelParams& params, double gamma_lo,
                            double gamma_hi, double horizon,
                            std::uint64_t seed, std::uint64_t stream,
                            const SampleSpec& samples) {
  if (!(0.0 <= gamma_lo && gamma_lo <= gamma_hi))
    throw ConfigError("need 0 <= gamma_lo <= gamma_hi");
  return couple_gamma_ladder(initial, params, {gamma_lo, gamma_hi}, horizon,
                             seed, stream, samples);
}

CouplingReport couple_birthrate(const SpatialConfig& initial,
                                const ModelParams& params, double beta2_lo,
                                double beta2_hi, double horizon,
                                std::uint64_t seed, std::uint64_t stream,
                                const SampleSpec& samples) {
  if (!(0.0 <= beta2_lo && beta2_lo <= beta2_hi))
    throw ConfigError("need 0 <= beta2_lo <= beta2_hi");
  return couple_birthrate_ladder(initial, params, {beta2_lo, beta2_hi},
                                 horizon, seed, stream, samples);
}

CouplingReport couple_gbt(const SpatialConfig& initial_a,
                          const SpatialConfig& initial_g,
                          const ModelParams& params, double horizon,
                          std::uint64_t seed, std::uint64_t stream,
                          const SampleSpec& samples) {
  params.validate();
  if (params.gamma > params.beta1)
    throw ConfigError("the coupling requires gamma <= beta1 (label-1 arrows "
                      "carry rate (beta1 - gamma)/N)");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (initial_a.dim != params.dim || initial_a.side != params.side)
    throw ConfigError("initial configuration does not match params geometry");
  if (initial_g.dim != initial_a.dim || initial_g.side != initial_a.side)
    throw ConfigError("coordinate configurations differ in geometry");
  for (long s = 0; s < initial_a.n_sites(); ++s)
    if (!pair_in_closed_set({initial_a.at(s), initial_g.at(s)}))
      throw ConfigError("initial pair outside the closed state set at site " +
                        std::to_string(s));

  TorusGeometry geom(params.dim, params.side);
  NeighborhoodTemplate tmpl =
      build_neighborhood(params.dim, params.range, params.side);
  NeighborTable table = build_neighbor_table(geom, tmpl);
  std::vector<KindSpec> kinds = {{1.0, false},
                                 {params.gamma, true},
                                 {params.beta1 - params.gamma, true},
                                 {params.beta2, true}};
  EventStream src(geom, &table, kinds, 0.0, horizon, seed, stream);

  SpatialConfig a = initial_a;
  SpatialConfig g = initial_g;

  CouplingReport report;
  report.horizon = horizon;
  report.parameter_values = {params.gamma};

  std::size_t next_sample = 0;
  auto record_up_to = [&](double t) {
    while (next_sample < samples.times.size() && samples.times[next_sample] <= t) {
      CouplingSample cs;
      cs.time = samples.times[next_sample];
      cs.counts.push_back(a.counts);
      cs.counts.push_back(g.counts);
      report.samples.push_back(std::move(cs));
      ++next_sample;
    }
  };

  RawEvent raw;
  while (src.next(raw)) {
    record_up_to(
        std::nextafter(raw.time, -std::numeric_limits<double>::infinity()));
    int label = raw.kind == 0 ? kCrossLabel : raw.kind - 1;
    PairState tail{a.at(raw.tail), g.at(raw.tail)};
    PairState head{a.at(raw.head), g.at(raw.head)};
    PairState after = gbt_transition(tail, head, label);
    a.set(raw.head, after.a);
    g.set(raw.head, after.g);
    if (!pair_in_closed_set({a.at(raw.head), g.at(raw.head)})) {
      if (report.violations == 0) {
        report.first_violation =
            GraphEvent{raw.time, EventKind::kCross, raw.tail, raw.head};
        report.first_violation_note =
            "pair left the closed set at site " + std::to_string(raw.head);
      }
      ++report.violations;
    }
  }
  record_up_to(horizon);

  for (const SpatialConfig* c : {&a, &g}) {
    long c1 = c->counts[kInhibitory], c2 = c->counts[kSusceptible];
    report.outcomes.push_back(c1 == 0 && c2 == 0 ? Outcome::kBothExtinct
                              : c2 == 0          ? Outcome::kSpecies1Wins
                              : c1 == 0          ? Outcome::kSpecies2Wins
                                                 : Outcome::kCoexistAtHorizon);
  }
  return report;
}

CouplingReport couple_gbt(const SpatialConfig& initial,
                          const ModelParams& params, double horizon,
                          std::uint64_t seed, std::uint64_t stream,
                          const SampleSpec& samples) {
  return couple_gbt(initial, initial, params, horizon, seed, stream, samples);
}

void write_coupling_csv(std::ostream& os, const CouplingReport& report) {
  std::size_t n_procs = report.outcomes.size();
  if (n_procs == 0 && !report.samples.empty())
    n_procs = report.samples[0].counts.size();
  os << "t";
  for (std::size_t j = 0; j < n_procs; ++j)
    os << ",count0_p" << j << ",count1_p" << j << ",count2_p" << j;
  os << ",violations\n";
  char buf[64];
  for (const CouplingSample& cs : report.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", cs.time);
    os << buf;
    for (const auto& c : cs.counts)
      os << ',' << c[0] << ',' << c[1] << ',' << c[2];
    os << ',' << report.violations << '\n';
  }
}

}  // namespace allelo
