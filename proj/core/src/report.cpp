#include "confscreen/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace confscreen {

namespace {

using nlohmann::json;

json interval_json(const Interval& ci) { return json::array({ci.lower, ci.upper}); }

json index_json(const IndexEstimate& ix) {
  json j;
  j["value"] = ix.value ? json(*ix.value) : json(nullptr);
  j["ci"] = ix.ci ? interval_json(*ix.ci) : json(nullptr);
  return j;
}

json point_biserial_json(const PointBiserial& pb) {
  json j;
  j["r"] = pb.r ? json(*pb.r) : json(nullptr);
  j["p_value"] = pb.p_value ? json(*pb.p_value) : json(nullptr);
  j["ci"] = pb.ci ? interval_json(*pb.ci) : json(nullptr);
  if (!pb.note.empty()) j["note"] = pb.note;
  return j;
}

json screening_json(const ScreeningReport& r) {
  json j;
  j["tier"] = to_string(r.tier);
  j["degenerate"] = r.degenerate;
  j["trin_warning"] = r.trin_warning;
  j["excluded_by_parse_rate"] = r.excluded_by_parse_rate;
  j["parse_rate"] = r.parse_rate;
  j["unjudged_parse_ok"] = r.unjudged_parse_ok;
  j["table"] = {{"a", r.table.a}, {"b", r.table.b}, {"c", r.table.c}, {"d", r.table.d}};
  j["indices"] = {{"L", index_json(r.indices.L)},
                  {"Fp", index_json(r.indices.Fp)},
                  {"RBS", index_json(r.indices.RBS)},
                  {"TRIN", index_json(r.indices.TRIN)},
                  {"r_pb", point_biserial_json(r.indices.r_pb)}};
  json steps = json::array();
  for (const auto& s : r.steps) {
    json step;
    step["name"] = s.name;
    step["observed"] = s.observed ? json(*s.observed) : json(nullptr);
    step["threshold"] = s.threshold;
    step["outcome"] = to_string(s.outcome);
    if (!s.note.empty()) step["note"] = s.note;
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  return j;
}

json metrics_json(const MetricsReport& m) {
  json j;
  j["ceiling_rate"] = m.ceiling_rate ? json(*m.ceiling_rate) : json(nullptr);
  j["ceiling_rate_sensitivity"] =
      m.ceiling_rate_sensitivity ? json(*m.ceiling_rate_sensitivity) : json(nullptr);
  if (m.auroc2) {
    j["auroc2"] = {{"point", m.auroc2->point},
                   {"lower", m.auroc2->lower},
                   {"upper", m.auroc2->upper},
                   {"failed_resamples", m.auroc2->failed_resamples}};
  } else {
    j["auroc2"] = nullptr;
  }
  {
    json ridge;
    ridge["mean_r2"] = m.ridge_r2_cv.mean_r2 ? json(*m.ridge_r2_cv.mean_r2) : json(nullptr);
    json folds = json::array();
    for (const auto& f : m.ridge_r2_cv.per_fold) {
      folds.push_back(f ? json(*f) : json(nullptr));
    }
    ridge["per_fold"] = std::move(folds);
    ridge["degenerate_folds"] = m.ridge_r2_cv.degenerate_folds;
    j["ridge_r2_cv"] = std::move(ridge);
  }
  auto corr_json = [](const std::optional<Correlation>& c) {
    if (!c) return json(nullptr);
    return json{{"value", c->value}, {"p_value", c->p_value}};
  };
  j["spearman_difficulty"] = corr_json(m.spearman_difficulty);
  j["partial_trace_corr"] = corr_json(m.partial_trace_corr);
  {
    json runs = json::array();
    for (const auto& run : m.split_half) {
      runs.push_back({{"seed", run.seed},
                      {"tier_a", to_string(run.tier_a)},
                      {"tier_b", to_string(run.tier_b)},
                      {"agree", run.agree}});
    }
    j["split_half"] = std::move(runs);
    j["split_half_agreement"] =
        m.split_half_agreement ? json(*m.split_half_agreement) : json(nullptr);
  }
  j["mar"] = {{"fail_rate_correct",
               m.mar.fail_rate_correct ? json(*m.mar.fail_rate_correct) : json(nullptr)},
              {"fail_rate_incorrect", m.mar.fail_rate_incorrect
                                          ? json(*m.mar.fail_rate_incorrect)
                                          : json(nullptr)}};
  return j;
}

json cell_result_json(const CellResult& r) {
  json j;
  j["model_id"] = r.model_id;
  j["condition"] = to_string(r.condition);
  j["n_total"] = r.n_total;
  j["n_parse_ok"] = r.n_parse_ok;
  j["parse_rate"] = r.parse_rate;
  j["excluded_by_parse_rate"] = r.excluded_by_parse_rate;
  j["screening"] = screening_json(r.screening);
  j["metrics"] = metrics_json(r.metrics);
  return j;
}

std::string fmt(std::optional<double> v, const char* spec = "%8.4f") {
  if (!v) return "      NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), spec, *v);
  return buf;
}

}  // namespace

std::vector<CellResult> evaluate_all(const std::vector<Cell>& cells,
                                     const EvaluateConfig& config) {
  EvaluateConfig cfg = config;
  cfg.metrics.screen = cfg.screen;  // split-half screening matches the main pass

  const auto difficulty = compute_item_difficulty(cells);
  std::vector<CellResult> results;
  results.reserve(cells.size());
  for (const auto& cell : cells) {
    CellResult r;
    r.model_id = cell.model_id;
    r.condition = cell.condition;
    r.n_total = cell.n_total;
    r.n_parse_ok = cell.n_parse_ok;
    r.screening = screen_cell(cell, cfg.screen);
    r.parse_rate = r.screening.parse_rate;
    r.excluded_by_parse_rate = r.screening.excluded_by_parse_rate;
    r.metrics = compute_metrics(cell, difficulty, cfg.metrics);
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const CellResult& x, const CellResult& y) {
    if (x.model_id != y.model_id) return x.model_id < y.model_id;
    return static_cast<int>(x.condition) < static_cast<int>(y.condition);
  });
  return results;
}

std::string emit_report(const std::vector<CellResult>& results, ReportFormat format) {
  if (format == ReportFormat::JSON) {
    json j = json::array();
    for (const auto& r : results) j.push_back(cell_result_json(r));
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line),
                "%-24s %-4s %6s %7s %5s %-13s %8s %8s %8s %8s %8s %8s\n", "model",
                "cond", "n", "parse%", "excl", "tier", "L", "Fp", "RBS", "TRIN",
                "ceil", "auroc2");
  out << line;
  out << std::string(118, '-') << "\n";
  for (const auto& r : results) {
    std::optional<double> auroc;
    if (r.metrics.auroc2) auroc = r.metrics.auroc2->point;
    std::snprintf(line, sizeof(line),
                  "%-24s %-4s %6zu %6.1f%% %5s %-13s %s %s %s %s %s %s\n",
                  r.model_id.c_str(), to_string(r.condition), r.n_total,
                  100.0 * r.parse_rate, r.excluded_by_parse_rate ? "yes" : "",
                  to_string(r.screening.tier), fmt(r.screening.indices.L.value).c_str(),
                  fmt(r.screening.indices.Fp.value).c_str(),
                  fmt(r.screening.indices.RBS.value).c_str(),
                  fmt(r.screening.indices.TRIN.value).c_str(),
                  fmt(r.metrics.ceiling_rate).c_str(), fmt(auroc).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace confscreen
