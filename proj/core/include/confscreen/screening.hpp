#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confscreen/stats.hpp"
#include "confscreen/trial.hpp"

namespace confscreen {

// Protocol constants. These are part of the screening procedure itself and
// are deliberately not runtime-configurable.
namespace protocol {
constexpr double kDegeneracyShare = 0.95;       // > 95% one-sided is degenerate
constexpr int kDegeneracyMinDistinct = 3;       // < 3 distinct values is degenerate
constexpr std::int64_t kMinCellCount = 5;       // any 2x2 count < 5 is insufficient
constexpr double kTrinWarn = 0.95;              // TRIN >= 0.95 structural warning
constexpr double kFpPoint = 0.50;               // Fp >= 0.50 ...
constexpr double kFpLowerBound = 0.40;          // ... with Wilson lower > 0.40
constexpr double kLPoint = 0.95;                // L >= 0.95 ...
constexpr double kLLowerBound = 0.90;           // ... with Wilson lower > 0.90
constexpr double kRbsPoint = 0.05;              // RBS > 0.05 with CI excluding zero
constexpr double kWilsonLevel = 0.95;
constexpr double kDistinctRounding = 1e6;       // values rounded to 6 decimals
}  // namespace protocol

enum class Tier { INVALID, INDETERMINATE, VALID, INSUFFICIENT };
const char* to_string(Tier t);

enum class StepOutcome {
  PASS,          // threshold not violated
  VIOLATION,     // full violation (tier-determining)
  INDETERMINATE, // point threshold violated, interval condition unmet
  WARNING,       // structural warning only (TRIN)
  NOT_EVALUABLE, // undefined index / missing inputs; cannot trigger
  REPORTED,      // diagnostic step, no classification action
};
const char* to_string(StepOutcome o);

struct StepRecord {
  std::string name;
  std::optional<double> observed;
  std::string threshold;
  StepOutcome outcome = StepOutcome::PASS;
  std::string note;
};

struct IndexEstimate {
  std::optional<double> value;
  std::optional<Interval> ci;
};

struct PointBiserial {
  std::optional<double> r;
  std::optional<double> p_value;
  std::optional<Interval> ci;
  std::string note;  // reason when undefined
};

struct ValidityIndices {
  IndexEstimate L;     // P(high | incorrect) = b/(b+d)
  IndexEstimate Fp;    // P(low | correct) = c/(a+c)
  IndexEstimate RBS;   // Fp - (1 - L); CI via seeded percentile bootstrap
  IndexEstimate TRIN;  // max(n_high, n_low) / N
  PointBiserial r_pb;
};

struct DegeneracyVerdict {
  bool too_few_distinct = false;
  bool one_sided = false;
  std::size_t distinct_values = 0;
  double dominant_share = 0.0;
};

struct ScreeningReport {
  Tier tier = Tier::VALID;
  bool degenerate = false;
  bool trin_warning = false;
  ValidityIndices indices;
  ContingencyTable table;
  std::vector<StepRecord> steps;
  bool excluded_by_parse_rate = false;
  double parse_rate = 0.0;
  std::size_t unjudged_parse_ok = 0;
};

struct ScreenOptions {
  double binarize_threshold = 0.5;
  double exclusion_threshold = 0.30;  // parse-failure fraction, strict >
  int bootstrap_resamples = 2000;
  std::uint64_t seed = 42;
};

// Wilson score interval for k successes out of n. Throws on n = 0 or a level
// outside (0,1); callers must route empty samples to INSUFFICIENT first.
Interval wilson_interval(std::int64_t k, std::int64_t n, double level);

// Degeneracy pre-check over parse-ok confidences. Returns the verdict iff
// either trigger fired. Throws when the cell has no parse-ok trials.
std::optional<DegeneracyVerdict> degeneracy_check(const Cell& cell,
                                                  double binarize_threshold = 0.5);

// Point estimates plus Wilson CIs for L, Fp, TRIN. RBS gets its point value
// only; its bootstrap CI requires trial-level resampling (screen_cell).
ValidityIndices compute_indices(const ContingencyTable& table);

// Point-biserial correlation between confidence and correctness over judged
// parse-ok trials. Never throws: unmet preconditions produce an undefined
// diagnostic with a note.
PointBiserial point_biserial(const std::vector<TrialRecord>& trials);

// Ordered screening sequence over a full cell. Every step is evaluated and
// recorded; the first tier-determining step fixes the tier.
ScreeningReport screen_cell(const Cell& cell, const ScreenOptions& options = {});

// Screening from a bare 2x2 table (steps 2-6). The degeneracy pre-check and
// the point-biserial diagnostic need raw trials and are recorded as not
// evaluable. Intended for hand-built tables.
ScreeningReport screen_table(const ContingencyTable& table,
                             const ScreenOptions& options = {});

}  // namespace confscreen
