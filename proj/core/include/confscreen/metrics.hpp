#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confscreen/screening.hpp"
#include "confscreen/stats.hpp"
#include "confscreen/trial.hpp"

namespace confscreen {

struct AurocEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int failed_resamples = 0;  // resamples still single-class after capped retries
};

struct RidgeCvR2 {
  std::optional<double> mean_r2;               // over folds with SST > 0
  std::vector<std::optional<double>> per_fold; // nullopt for degenerate folds
  int degenerate_folds = 0;
};

struct Correlation {
  double value = 0.0;
  double p_value = 1.0;
};

struct SplitHalfRun {
  std::uint64_t seed = 0;
  Tier tier_a = Tier::VALID;
  Tier tier_b = Tier::VALID;
  bool agree = false;
};

struct MarRates {
  std::optional<double> fail_rate_correct;
  std::optional<double> fail_rate_incorrect;
};

struct MetricsConfig {
  double ceiling_threshold = 0.95;
  int bootstrap_resamples = 2000;
  std::uint64_t seed = 42;
  int split_half_seeds = 20;
  int ridge_folds = 5;
  double ridge_lambda = 1.0;
  std::size_t ridge_min_trials = 10;
  ScreenOptions screen;  // used by split-half screening
};

struct MetricsReport {
  std::optional<double> ceiling_rate;
  std::optional<double> ceiling_rate_sensitivity;
  std::optional<AurocEstimate> auroc2;
  RidgeCvR2 ridge_r2_cv;
  std::optional<Correlation> spearman_difficulty;
  std::optional<Correlation> partial_trace_corr;
  std::vector<SplitHalfRun> split_half;
  std::optional<double> split_half_agreement;  // fraction of agreeing seeds
  MarRates mar;
};

// Fraction of parse-ok trials with confidence >= threshold.
std::optional<double> ceiling_rate(const Cell& cell, double threshold = 0.95);

// Sensitivity re-coding: confidence-parse-failed trials are pooled with the
// ceiling mass and all trials enter the denominator.
std::optional<double> ceiling_rate_sensitivity(const Cell& cell,
                                               double threshold = 0.95);

// Mann-Whitney Type-2 AUROC over judged parse-ok trials: the probability a
// correct trial carries strictly higher confidence than an incorrect one,
// ties counted half. Undefined for single-class cells.
std::optional<double> auroc2(const std::vector<TrialRecord>& trials);

// Seeded percentile bootstrap around auroc2. Single-class resamples are
// redrawn up to a capped retry budget, then counted in failed_resamples.
std::optional<AurocEstimate> auroc2_bootstrap(const std::vector<TrialRecord>& trials,
                                              int resamples, std::uint64_t seed);

// k-fold cross-validated R^2 of ridge regression (single standardised
// feature, fixed lambda) predicting confidence from logprob_mean.
RidgeCvR2 ridge_cv_r2(const std::vector<TrialRecord>& trials,
                      const MetricsConfig& config = {});

// Spearman rank correlation with mid-ranks; p via the t approximation.
std::optional<Correlation> spearman(const std::vector<double>& x,
                                    const std::vector<double>& y);

// Partial rank correlation of x and y controlling for a third series.
std::optional<Correlation> partial_spearman(const std::vector<double>& x,
                                            const std::vector<double>& y,
                                            const std::vector<double>& control);

// Seeded random half-split of the cell; both halves screened independently.
SplitHalfRun split_half_agreement(const Cell& cell, std::uint64_t seed,
                                  const ScreenOptions& options = {});

// Confidence-parse-failure rate split by correctness class.
MarRates mar_diagnostic(const Cell& cell);

// Item difficulty = 1 - fraction of NUM cells answering the item correctly,
// over whatever cells are loaded. Items with no judged NUM trial are absent.
std::map<std::string, double> compute_item_difficulty(const std::vector<Cell>& cells);

// Full per-cell metric suite. Metrics whose preconditions fail stay unset.
MetricsReport compute_metrics(const Cell& cell,
                              const std::map<std::string, double>& item_difficulty,
                              const MetricsConfig& config = {});

}  // namespace confscreen
