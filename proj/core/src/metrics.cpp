#include "confscreen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "confscreen/rng.hpp"

namespace confscreen {

namespace {

struct JudgedTrial {
  double confidence;
  bool correct;
};

std::vector<JudgedTrial> judged_parse_ok(const std::vector<TrialRecord>& trials) {
  std::vector<JudgedTrial> out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    if (t.parse_status == ParseStatus::OK && t.correct) {
      out.push_back({*t.confidence, *t.correct});
    }
  }
  return out;
}

std::optional<double> auroc2_impl(const std::vector<JudgedTrial>& sample) {
  std::size_t n1 = 0;
  for (const auto& s : sample) n1 += s.correct ? 1 : 0;
  const std::size_t n0 = sample.size() - n1;
  if (n1 == 0 || n0 == 0) return std::nullopt;

  std::vector<double> conf(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) conf[i] = sample[i].confidence;
  const std::vector<double> ranks = mid_ranks(conf);

  double rank_sum_correct = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i].correct) rank_sum_correct += ranks[i];
  }
  const double nn1 = static_cast<double>(n1);
  const double u = rank_sum_correct - nn1 * (nn1 + 1.0) / 2.0;
  return u / (nn1 * static_cast<double>(n0));
}

}  // namespace

std::optional<double> ceiling_rate(const Cell& cell, double threshold) {
  std::size_t ok = 0, at_ceiling = 0;
  for (const auto& t : cell.trials) {
    if (t.parse_status != ParseStatus::OK) continue;
    ++ok;
    if (*t.confidence >= threshold) ++at_ceiling;
  }
  if (ok == 0) return std::nullopt;
  return static_cast<double>(at_ceiling) / static_cast<double>(ok);
}

std::optional<double> ceiling_rate_sensitivity(const Cell& cell, double threshold) {
  if (cell.trials.empty()) return std::nullopt;
  std::size_t numerator = 0;
  for (const auto& t : cell.trials) {
    if (t.parse_status == ParseStatus::OK) {
      if (*t.confidence >= threshold) ++numerator;
    } else if (t.parse_status == ParseStatus::CONFIDENCE_PARSE_FAIL) {
      ++numerator;
    }
  }
  return static_cast<double>(numerator) / static_cast<double>(cell.trials.size());
}

std::optional<double> auroc2(const std::vector<TrialRecord>& trials) {
  return auroc2_impl(judged_parse_ok(trials));
}

std::optional<AurocEstimate> auroc2_bootstrap(const std::vector<TrialRecord>& trials,
                                              int resamples, std::uint64_t seed) {
  const std::vector<JudgedTrial> sample = judged_parse_ok(trials);
  const auto point = auroc2_impl(sample);
  if (!point || resamples <= 0) return std::nullopt;

  constexpr int kMaxRetries = 100;
  Rng rng(seed);
  const std::size_t m = sample.size();
  std::vector<JudgedTrial> draw(m);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(resamples));
  int failed = 0;

  for (int rep = 0; rep < resamples; ++rep) {
    std::optional<double> value;
    for (int attempt = 0; attempt <= kMaxRetries && !value; ++attempt) {
      for (std::size_t i = 0; i < m; ++i) {
        draw[i] = sample[static_cast<std::size_t>(rng.bounded(m))];
      }
      value = auroc2_impl(draw);
    }
    if (value) {
      values.push_back(*value);
    } else {
      ++failed;
    }
  }
  AurocEstimate est;
  est.point = *point;
  est.failed_resamples = failed;
  if (!values.empty()) {
    est.lower = sample_quantile(values, 0.025);
    est.upper = sample_quantile(values, 0.975);
  } else {
    est.lower = est.upper = *point;
  }
  return est;
}

RidgeCvR2 ridge_cv_r2(const std::vector<TrialRecord>& trials,
                      const MetricsConfig& config) {
  RidgeCvR2 result;
  std::vector<double> x, y;
  for (const auto& t : trials) {
    if (t.parse_status == ParseStatus::OK && t.logprob_mean) {
      x.push_back(*t.logprob_mean);
      y.push_back(*t.confidence);
    }
  }
  const std::size_t n = x.size();
  if (n < config.ridge_min_trials || config.ridge_folds < 2) return result;
  const int k = config.ridge_folds;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  rng.shuffle(order);

  std::vector<double> fold_values;
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t start = 0;
  for (int fold = 0; fold < k; ++fold) {
    const std::size_t size = base + (static_cast<std::size_t>(fold) < extra ? 1 : 0);
    const std::size_t end = start + size;

    double mean_x = 0.0, mean_y = 0.0;
    std::size_t n_train = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= start && i < end) continue;
      mean_x += x[order[i]];
      mean_y += y[order[i]];
      ++n_train;
    }
    mean_x /= static_cast<double>(n_train);
    mean_y /= static_cast<double>(n_train);

    double var_x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= start && i < end) continue;
      const double dx = x[order[i]] - mean_x;
      var_x += dx * dx;
    }
    const double sd_x = std::sqrt(var_x / static_cast<double>(n_train));

    // Ridge slope on the standardised feature; constant feature keeps the
    // train-mean predictor.
    double beta = 0.0;
    if (sd_x > 0.0) {
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i >= start && i < end) continue;
        const double xs = (x[order[i]] - mean_x) / sd_x;
        sxy += xs * (y[order[i]] - mean_y);
        sxx += xs * xs;
      }
      beta = sxy / (sxx + config.ridge_lambda);
    }

    double mean_y_test = 0.0;
    for (std::size_t i = start; i < end; ++i) mean_y_test += y[order[i]];
    mean_y_test /= static_cast<double>(size);

    double sse = 0.0, sst = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      const double xs = sd_x > 0.0 ? (x[order[i]] - mean_x) / sd_x : 0.0;
      const double pred = mean_y + beta * xs;
      const double err = y[order[i]] - pred;
      sse += err * err;
      const double dy = y[order[i]] - mean_y_test;
      sst += dy * dy;
    }
    if (sst > 0.0) {
      const double r2 = 1.0 - sse / sst;
      result.per_fold.push_back(r2);
      fold_values.push_back(r2);
    } else {
      result.per_fold.push_back(std::nullopt);
      ++result.degenerate_folds;
    }
    start = end;
  }
  if (!fold_values.empty()) result.mean_r2 = mean_of(fold_values);
  return result;
}

std::optional<Correlation> spearman(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) return std::nullopt;
  const auto rho = pearson(mid_ranks(x), mid_ranks(y));
  if (!rho) return std::nullopt;
  Correlation c;
  c.value = *rho;
  const double n = static_cast<double>(x.size());
  if (std::fabs(*rho) >= 1.0 - 1e-12) {
    c.p_value = 0.0;
  } else {
    const double t = *rho * std::sqrt((n - 2.0) / (1.0 - *rho * *rho));
    c.p_value = t_two_sided_p(t, n - 2.0);
  }
  return c;
}

std::optional<Correlation> partial_spearman(const std::vector<double>& x,
                                            const std::vector<double>& y,
                                            const std::vector<double>& control) {
  if (x.size() != y.size() || x.size() != control.size() || x.size() < 4) {
    return std::nullopt;
  }
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  const auto rz = mid_ranks(control);
  const auto r_xy = pearson(rx, ry);
  const auto r_xz = pearson(rx, rz);
  const auto r_yz = pearson(ry, rz);
  if (!r_xy || !r_xz || !r_yz) return std::nullopt;

  const double denom_sq = (1.0 - *r_xz * *r_xz) * (1.0 - *r_yz * *r_yz);
  const double num = *r_xy - *r_xz * *r_yz;
  Correlation c;
  if (denom_sq <= 1e-24) {
    // Control absorbs all shared ranking; the residual association is zero
    // when the numerator vanishes, undefined otherwise.
    if (std::fabs(num) <= 1e-12) {
      c.value = 0.0;
      c.p_value = 1.0;
      return c;
    }
    return std::nullopt;
  }
  c.value = num / std::sqrt(denom_sq);
  const double n = static_cast<double>(x.size());
  if (std::fabs(c.value) >= 1.0 - 1e-12) {
    c.value = std::clamp(c.value, -1.0, 1.0);
    c.p_value = 0.0;
  } else {
    const double t = c.value * std::sqrt((n - 3.0) / (1.0 - c.value * c.value));
    c.p_value = t_two_sided_p(t, n - 3.0);
  }
  return c;
}

SplitHalfRun split_half_agreement(const Cell& cell, std::uint64_t seed,
                                  const ScreenOptions& options) {
  if (cell.trials.size() < 2) {
    throw std::invalid_argument("split_half_agreement: need at least 2 trials");
  }
  std::vector<std::size_t> order(cell.trials.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t half = order.size() / 2;  // odd trial dropped at random

  std::vector<TrialRecord> trials_a, trials_b;
  trials_a.reserve(half);
  trials_b.reserve(half);
  for (std::size_t i = 0; i < half; ++i) trials_a.push_back(cell.trials[order[i]]);
  for (std::size_t i = half; i < 2 * half; ++i) trials_b.push_back(cell.trials[order[i]]);

  SplitHalfRun run;
  run.seed = seed;
  run.tier_a =
      screen_cell(Cell::from_trials(cell.model_id, cell.condition, std::move(trials_a)),
                  options)
          .tier;
  run.tier_b =
      screen_cell(Cell::from_trials(cell.model_id, cell.condition, std::move(trials_b)),
                  options)
          .tier;
  run.agree = run.tier_a == run.tier_b;
  return run;
}

MarRates mar_diagnostic(const Cell& cell) {
  std::size_t n_correct = 0, n_incorrect = 0;
  std::size_t fail_correct = 0, fail_incorrect = 0;
  for (const auto& t : cell.trials) {
    if (!t.correct) continue;
    const bool fail = t.parse_status == ParseStatus::CONFIDENCE_PARSE_FAIL;
    if (*t.correct) {
      ++n_correct;
      fail_correct += fail ? 1 : 0;
    } else {
      ++n_incorrect;
      fail_incorrect += fail ? 1 : 0;
    }
  }
  MarRates rates;
  if (n_correct > 0) {
    rates.fail_rate_correct =
        static_cast<double>(fail_correct) / static_cast<double>(n_correct);
  }
  if (n_incorrect > 0) {
    rates.fail_rate_incorrect =
        static_cast<double>(fail_incorrect) / static_cast<double>(n_incorrect);
  }
  return rates;
}

std::map<std::string, double> compute_item_difficulty(const std::vector<Cell>& cells) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> tallies;  // correct, judged
  for (const auto& cell : cells) {
    if (cell.condition != Condition::NUM) continue;
    for (const auto& t : cell.trials) {
      if (!t.correct) continue;
      auto& tally = tallies[t.item_id];
      tally.first += *t.correct ? 1 : 0;
      tally.second += 1;
    }
  }
  std::map<std::string, double> difficulty;
  for (const auto& [item, tally] : tallies) {
    difficulty[item] =
        1.0 - static_cast<double>(tally.first) / static_cast<double>(tally.second);
  }
  return difficulty;
}

MetricsReport compute_metrics(const Cell& cell,
                              const std::map<std::string, double>& item_difficulty,
                              const MetricsConfig& config) {
  MetricsReport report;
  report.ceiling_rate = ceiling_rate(cell, config.ceiling_threshold);
  report.ceiling_rate_sensitivity =
      ceiling_rate_sensitivity(cell, config.ceiling_threshold);
  report.auroc2 =
      auroc2_bootstrap(cell.trials, config.bootstrap_resamples, config.seed);
  report.ridge_r2_cv = ridge_cv_r2(cell.trials, config);
  report.mar = mar_diagnostic(cell);

  {
    std::vector<double> difficulty, confidence;
    for (const auto& t : cell.trials) {
      if (t.parse_status != ParseStatus::OK) continue;
      auto it = item_difficulty.find(t.item_id);
      if (it == item_difficulty.end()) continue;
      difficulty.push_back(it->second);
      confidence.push_back(*t.confidence);
    }
    report.spearman_difficulty = spearman(difficulty, confidence);
  }

  {
    std::vector<double> trace, confidence, difficulty;
    for (const auto& t : cell.trials) {
      if (t.parse_status != ParseStatus::OK || !t.trace_length) continue;
      auto it = item_difficulty.find(t.item_id);
      if (it == item_difficulty.end()) continue;
      trace.push_back(static_cast<double>(*t.trace_length));
      confidence.push_back(*t.confidence);
      difficulty.push_back(it->second);
    }
    report.partial_trace_corr = partial_spearman(trace, confidence, difficulty);
  }

  if (cell.trials.size() >= 2 && config.split_half_seeds > 0) {
    std::size_t agreements = 0;
    for (int i = 0; i < config.split_half_seeds; ++i) {
      auto run = split_half_agreement(cell, config.seed + static_cast<std::uint64_t>(i),
                                      config.screen);
      agreements += run.agree ? 1 : 0;
      report.split_half.push_back(run);
    }
    report.split_half_agreement = static_cast<double>(agreements) /
                                  static_cast<double>(config.split_half_seeds);
  }
  return report;
}

}  // namespace confscreen
