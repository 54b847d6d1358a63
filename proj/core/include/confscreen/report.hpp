#pragma once

#include <string>
#include <vector>

#include "confscreen/metrics.hpp"
#include "confscreen/screening.hpp"
#include "confscreen/trial.hpp"

namespace confscreen {

enum class ReportFormat { JSON, TEXT_TABLE };

struct CellResult {
  std::string model_id;
  Condition condition = Condition::NUM;
  std::size_t n_total = 0;
  std::size_t n_parse_ok = 0;
  double parse_rate = 0.0;
  bool excluded_by_parse_rate = false;
  ScreeningReport screening;
  MetricsReport metrics;
};

struct EvaluateConfig {
  ScreenOptions screen;
  MetricsConfig metrics;

  EvaluateConfig() { metrics.screen = screen; }
};

// Screens and measures every cell. Excluded cells are still screened and
// labelled; output is sorted by model_id then condition.
std::vector<CellResult> evaluate_all(const std::vector<Cell>& cells,
                                     const EvaluateConfig& config = {});

// JSON form is loss-free (indices, bounds, audit steps, flags); the text form
// is a per-cell table of tier and headline statistics.
std::string emit_report(const std::vector<CellResult>& results, ReportFormat format);

}  // namespace confscreen
