#include "confscreen/screening.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include "confscreen/rng.hpp"

namespace confscreen {

const char* to_string(Tier t) {
  switch (t) {
    case Tier::INVALID: return "INVALID";
    case Tier::INDETERMINATE: return "INDETERMINATE";
    case Tier::VALID: return "VALID";
    case Tier::INSUFFICIENT: return "INSUFFICIENT";
  }
  return "?";
}

const char* to_string(StepOutcome o) {
  switch (o) {
    case StepOutcome::PASS: return "PASS";
    case StepOutcome::VIOLATION: return "VIOLATION";
    case StepOutcome::INDETERMINATE: return "INDETERMINATE";
    case StepOutcome::WARNING: return "WARNING";
    case StepOutcome::NOT_EVALUABLE: return "NOT_EVALUABLE";
    case StepOutcome::REPORTED: return "REPORTED";
  }
  return "?";
}

Interval wilson_interval(std::int64_t k, std::int64_t n, double level) {
  if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
  if (k < 0 || k > n) throw std::invalid_argument("wilson_interval: k out of [0,n]");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("wilson_interval: level out of (0,1)");
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2n = z * z / nn;
  const double centre = (phat + 0.5 * z2n) / (1.0 + z2n);
  const double halfwidth =
      (z / (1.0 + z2n)) *
      std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn));
  return Interval{std::max(0.0, centre - halfwidth), std::min(1.0, centre + halfwidth)};
}

std::optional<DegeneracyVerdict> degeneracy_check(const Cell& cell,
                                                  double binarize_threshold) {
  std::unordered_set<std::int64_t> distinct;
  std::size_t n_ok = 0;
  std::size_t n_high = 0;
  for (const auto& t : cell.trials) {
    if (t.parse_status != ParseStatus::OK) continue;
    ++n_ok;
    distinct.insert(std::llround(*t.confidence * protocol::kDistinctRounding));
    if (binarize(*t.confidence, binarize_threshold) == Band::HIGH) ++n_high;
  }
  if (n_ok == 0) {
    throw std::invalid_argument("degeneracy_check: cell has no parse-ok trials");
  }
  DegeneracyVerdict v;
  v.distinct_values = distinct.size();
  v.dominant_share =
      static_cast<double>(std::max(n_high, n_ok - n_high)) / static_cast<double>(n_ok);
  v.too_few_distinct =
      distinct.size() < static_cast<std::size_t>(protocol::kDegeneracyMinDistinct);
  v.one_sided = v.dominant_share > protocol::kDegeneracyShare;
  if (v.too_few_distinct || v.one_sided) return v;
  return std::nullopt;
}

ValidityIndices compute_indices(const ContingencyTable& table) {
  ValidityIndices ix;
  const std::int64_t bd = table.b + table.d;
  const std::int64_t ac = table.a + table.c;
  const std::int64_t n = table.total();
  if (bd > 0) {
    ix.L.value = static_cast<double>(table.b) / static_cast<double>(bd);
    ix.L.ci = wilson_interval(table.b, bd, protocol::kWilsonLevel);
  }
  if (ac > 0) {
    ix.Fp.value = static_cast<double>(table.c) / static_cast<double>(ac);
    ix.Fp.ci = wilson_interval(table.c, ac, protocol::kWilsonLevel);
  }
  if (ix.L.value && ix.Fp.value) {
    ix.RBS.value = *ix.Fp.value - (1.0 - *ix.L.value);
  }
  if (n > 0) {
    const std::int64_t dominant = std::max(table.n_high(), table.n_low());
    ix.TRIN.value = static_cast<double>(dominant) / static_cast<double>(n);
    ix.TRIN.ci = wilson_interval(dominant, n, protocol::kWilsonLevel);
  }
  return ix;
}

PointBiserial point_biserial(const std::vector<TrialRecord>& trials) {
  PointBiserial pb;
  std::vector<double> conf;
  std::vector<double> correct01;
  for (const auto& t : trials) {
    if (t.parse_status != ParseStatus::OK || !t.correct) continue;
    conf.push_back(*t.confidence);
    correct01.push_back(*t.correct ? 1.0 : 0.0);
  }
  const std::size_t n = conf.size();
  if (n < 3) {
    pb.note = "fewer than 3 judged parse-ok trials";
    return pb;
  }
  const auto n1 = static_cast<std::size_t>(
      std::count(correct01.begin(), correct01.end(), 1.0));
  if (n1 == 0 || n1 == n) {
    pb.note = "only one correctness class present";
    return pb;
  }
  auto r = pearson(conf, correct01);
  if (!r) {
    pb.note = "zero confidence variance";
    return pb;
  }
  pb.r = *r;
  const double nn = static_cast<double>(n);
  if (std::fabs(*r) >= 1.0 - 1e-12) {
    pb.p_value = 0.0;
    pb.ci = Interval{*r, *r};
    return pb;
  }
  const double t = *r * std::sqrt((nn - 2.0) / (1.0 - *r * *r));
  pb.p_value = t_two_sided_p(t, nn - 2.0);
  if (n > 3) {
    const double z = std::atanh(*r);
    const double half = normal_quantile(0.975) / std::sqrt(nn - 3.0);
    pb.ci = Interval{std::tanh(z - half), std::tanh(z + half)};
  }
  return pb;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Percentile bootstrap CI for RBS. RBS depends on the trials only through
// their contingency category, so case-resampling n trials is realised as n
// uniform category draws per resample.
std::optional<Interval> rbs_bootstrap_ci(const ContingencyTable& table,
                                         int resamples, std::uint64_t seed,
                                         int* invalid_resamples) {
  const std::int64_t n = table.total();
  *invalid_resamples = 0;
  if (n == 0 || resamples <= 0) return std::nullopt;
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(resamples));
  const std::uint64_t ta = static_cast<std::uint64_t>(table.a);
  const std::uint64_t tab = ta + static_cast<std::uint64_t>(table.b);
  const std::uint64_t tabc = tab + static_cast<std::uint64_t>(table.c);
  for (int rep = 0; rep < resamples; ++rep) {
    std::int64_t ra = 0, rb = 0, rc = 0, rd = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const std::uint64_t u = rng.bounded(static_cast<std::uint64_t>(n));
      if (u < ta) ++ra;
      else if (u < tab) ++rb;
      else if (u < tabc) ++rc;
      else ++rd;
    }
    const std::int64_t bd = rb + rd;
    const std::int64_t ac = ra + rc;
    if (bd == 0 || ac == 0) {
      ++*invalid_resamples;
      continue;
    }
    const double l = static_cast<double>(rb) / static_cast<double>(bd);
    const double fp = static_cast<double>(rc) / static_cast<double>(ac);
    values.push_back(fp - (1.0 - l));
  }
  if (values.size() < static_cast<std::size_t>(resamples) / 2) return std::nullopt;
  return Interval{sample_quantile(values, 0.025), sample_quantile(values, 0.975)};
}

struct StepInputs {
  std::optional<DegeneracyVerdict> degeneracy;   // nullopt: step not evaluable
  bool degeneracy_evaluable = false;
  std::string degeneracy_note;
  bool pb_evaluable = false;
  PointBiserial pb;
};

ScreeningReport run_steps(const ContingencyTable& table, const StepInputs& in,
                          const ScreenOptions& options) {
  ScreeningReport report;
  report.table = table;
  report.indices = compute_indices(table);

  int invalid_resamples = 0;
  if (report.indices.RBS.value) {
    report.indices.RBS.ci =
        rbs_bootstrap_ci(table, options.bootstrap_resamples, options.seed,
                         &invalid_resamples);
  }
  report.indices.r_pb = in.pb;

  std::optional<Tier> tier;
  auto settle = [&](Tier t) {
    if (!tier) tier = t;
  };
  bool any_indeterminate = false;

  // 1. degeneracy pre-check
  {
    StepRecord step;
    step.name = "degeneracy";
    step.threshold = "< 3 distinct values or one-sided share > 0.95";
    if (!in.degeneracy_evaluable) {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = in.degeneracy_note;
    } else if (in.degeneracy) {
      step.observed = in.degeneracy->dominant_share;
      step.outcome = StepOutcome::VIOLATION;
      step.note = std::string(in.degeneracy->too_few_distinct
                                  ? "distinct values = " +
                                        std::to_string(in.degeneracy->distinct_values)
                                  : "") +
                  (in.degeneracy->too_few_distinct && in.degeneracy->one_sided ? "; "
                                                                               : "") +
                  (in.degeneracy->one_sided
                       ? "one-sided share = " + format_value(in.degeneracy->dominant_share)
                       : "");
      report.degenerate = true;
      settle(Tier::INVALID);
    } else {
      step.outcome = StepOutcome::PASS;
      step.note = "distinct values and binarised balance within bounds";
    }
    report.steps.push_back(std::move(step));
  }

  // 2. cell counts
  {
    StepRecord step;
    step.name = "cell_counts";
    step.threshold = "every count >= 5";
    step.observed = static_cast<double>(table.min_count());
    if (table.min_count() < protocol::kMinCellCount) {
      step.outcome = StepOutcome::VIOLATION;
      step.note = "smallest contingency count below 5";
      settle(Tier::INSUFFICIENT);
    } else {
      step.outcome = StepOutcome::PASS;
    }
    report.steps.push_back(std::move(step));
  }

  // 3. TRIN (structural warning only)
  {
    StepRecord step;
    step.name = "trin";
    step.threshold = ">= 0.95 warns";
    if (report.indices.TRIN.value) {
      step.observed = *report.indices.TRIN.value;
      if (*report.indices.TRIN.value >= protocol::kTrinWarn) {
        step.outcome = StepOutcome::WARNING;
        report.trin_warning = true;
      } else {
        step.outcome = StepOutcome::PASS;
      }
    } else {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = "empty contingency table";
    }
    report.steps.push_back(std::move(step));
  }

  // 4. Fp
  {
    StepRecord step;
    step.name = "fp";
    step.threshold = ">= 0.50 with Wilson lower > 0.40";
    if (report.indices.Fp.value) {
      step.observed = *report.indices.Fp.value;
      if (*report.indices.Fp.value >= protocol::kFpPoint) {
        if (report.indices.Fp.ci && report.indices.Fp.ci->lower > protocol::kFpLowerBound) {
          step.outcome = StepOutcome::VIOLATION;
          settle(Tier::INVALID);
        } else {
          step.outcome = StepOutcome::INDETERMINATE;
          step.note = "point threshold violated, lower bound condition unmet";
          any_indeterminate = true;
        }
      } else {
        step.outcome = StepOutcome::PASS;
      }
    } else {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = "a + c = 0";
    }
    report.steps.push_back(std::move(step));
  }

  // 5. L
  {
    StepRecord step;
    step.name = "l";
    step.threshold = ">= 0.95 with Wilson lower > 0.90";
    if (report.indices.L.value) {
      step.observed = *report.indices.L.value;
      if (*report.indices.L.value >= protocol::kLPoint) {
        if (report.indices.L.ci && report.indices.L.ci->lower > protocol::kLLowerBound) {
          step.outcome = StepOutcome::VIOLATION;
          settle(Tier::INVALID);
        } else {
          step.outcome = StepOutcome::INDETERMINATE;
          step.note = "point threshold violated, lower bound condition unmet";
          any_indeterminate = true;
        }
      } else {
        step.outcome = StepOutcome::PASS;
      }
    } else {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = "b + d = 0";
    }
    report.steps.push_back(std::move(step));
  }

  // 6. RBS
  {
    StepRecord step;
    step.name = "rbs";
    step.threshold = "> 0.05 with bootstrap CI excluding zero";
    if (invalid_resamples > 0) {
      step.note = std::to_string(invalid_resamples) + " single-margin resamples skipped";
    }
    if (report.indices.RBS.value) {
      step.observed = *report.indices.RBS.value;
      if (*report.indices.RBS.value > protocol::kRbsPoint) {
        if (report.indices.RBS.ci && report.indices.RBS.ci->lower > 0.0) {
          step.outcome = StepOutcome::VIOLATION;
          settle(Tier::INVALID);
        } else {
          step.outcome = StepOutcome::INDETERMINATE;
          step.note = "point threshold violated, CI does not exclude zero";
          any_indeterminate = true;
        }
      } else {
        step.outcome = StepOutcome::PASS;
      }
    } else {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = "L or Fp undefined";
    }
    report.steps.push_back(std::move(step));
  }

  // 7. point-biserial (diagnostic only)
  {
    StepRecord step;
    step.name = "point_biserial";
    step.threshold = "diagnostic; no classification action";
    if (!in.pb_evaluable) {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = "requires trial-level data";
    } else if (in.pb.r) {
      step.observed = *in.pb.r;
      step.outcome = StepOutcome::REPORTED;
    } else {
      step.outcome = StepOutcome::NOT_EVALUABLE;
      step.note = in.pb.note;
    }
    report.steps.push_back(std::move(step));
  }

  if (!tier) tier = any_indeterminate ? Tier::INDETERMINATE : Tier::VALID;
  report.tier = *tier;
  return report;
}

}  // namespace

ScreeningReport screen_cell(const Cell& cell, const ScreenOptions& options) {
  StepInputs in;
  if (cell.n_parse_ok > 0) {
    in.degeneracy_evaluable = true;
    in.degeneracy = degeneracy_check(cell, options.binarize_threshold);
  } else {
    in.degeneracy_note = "no parse-ok trials";
  }
  in.pb_evaluable = true;
  in.pb = point_biserial(cell.trials);

  const ContingencyTable table = build_contingency(cell, options.binarize_threshold);
  ScreeningReport report = run_steps(table, in, options);
  report.unjudged_parse_ok = count_unjudged_parse_ok(cell);
  if (cell.n_total > 0) {
    report.parse_rate =
        static_cast<double>(cell.n_parse_ok) / static_cast<double>(cell.n_total);
    report.excluded_by_parse_rate =
        (1.0 - report.parse_rate) > options.exclusion_threshold;
  }
  return report;
}

ScreeningReport screen_table(const ContingencyTable& table,
                             const ScreenOptions& options) {
  if (table.a < 0 || table.b < 0 || table.c < 0 || table.d < 0) {
    throw std::invalid_argument("screen_table: negative count");
  }
  StepInputs in;
  in.degeneracy_note = "requires raw confidence values";
  in.pb.note = "requires trial-level data";
  ScreeningReport report = run_steps(table, in, options);
  report.parse_rate = 1.0;
  return report;
}

}  // namespace confscreen
