#include "confscreen/trial.hpp"

#include <algorithm>
#include <stdexcept>

namespace confscreen {

const char* to_string(Condition c) {
  return c == Condition::NUM ? "NUM" : "CAT";
}

const char* to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::OK: return "OK";
    case ParseStatus::CONFIDENCE_PARSE_FAIL: return "CONFIDENCE_PARSE_FAIL";
    case ParseStatus::ANSWER_PARSE_FAIL: return "ANSWER_PARSE_FAIL";
  }
  return "?";
}

std::optional<Condition> condition_from_string(const std::string& s) {
  if (s == "NUM") return Condition::NUM;
  if (s == "CAT") return Condition::CAT;
  return std::nullopt;
}

std::optional<ParseStatus> parse_status_from_string(const std::string& s) {
  if (s == "OK") return ParseStatus::OK;
  if (s == "CONFIDENCE_PARSE_FAIL") return ParseStatus::CONFIDENCE_PARSE_FAIL;
  if (s == "ANSWER_PARSE_FAIL") return ParseStatus::ANSWER_PARSE_FAIL;
  return std::nullopt;
}

std::string TrialRecord::invariant_violation() const {
  const bool has_conf = confidence.has_value();
  if (has_conf != (parse_status == ParseStatus::OK)) {
    return has_conf ? "confidence present but parse_status is not OK"
                    : "parse_status OK but confidence absent";
  }
  if (has_conf && (*confidence < 0.0 || *confidence > 1.0)) {
    return "confidence out of range [0,1]";
  }
  if (trace_length && *trace_length < 0) {
    return "trace_length negative";
  }
  return {};
}

Cell Cell::from_trials(std::string model_id, Condition condition,
                       std::vector<TrialRecord> trials) {
  Cell cell;
  cell.model_id = std::move(model_id);
  cell.condition = condition;
  cell.trials = std::move(trials);
  cell.recount();
  return cell;
}

void Cell::recount() {
  n_total = trials.size();
  n_parse_ok = 0;
  n_correct = 0;
  for (const auto& t : trials) {
    if (t.parse_status == ParseStatus::OK) {
      ++n_parse_ok;
      if (t.correct && *t.correct) ++n_correct;
    }
  }
}

std::string Cell::invariant_violation() const {
  for (const auto& t : trials) {
    if (t.model_id != model_id) return "trial model_id differs from cell";
    if (t.condition != condition) return "trial condition differs from cell";
    auto v = t.invariant_violation();
    if (!v.empty()) return v;
  }
  Cell copy = *this;
  copy.recount();
  if (copy.n_total != n_total || copy.n_parse_ok != n_parse_ok ||
      copy.n_correct != n_correct) {
    return "stored counts do not match recount";
  }
  return {};
}

std::int64_t ContingencyTable::min_count() const {
  return std::min(std::min(a, b), std::min(c, d));
}

Band binarize(double confidence, double threshold) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("binarize: confidence out of range [0,1]");
  }
  return confidence >= threshold ? Band::HIGH : Band::LOW;
}

double categorical_midpoint(int class_index) {
  if (class_index < 0 || class_index > 9) {
    throw std::invalid_argument("categorical_midpoint: class index out of range 0..9");
  }
  return (static_cast<double>(class_index) + 0.5) / 10.0;
}

ContingencyTable build_contingency(const Cell& cell, double threshold) {
  ContingencyTable table;
  for (const auto& t : cell.trials) {
    if (t.parse_status != ParseStatus::OK || !t.correct) continue;
    const bool high = binarize(*t.confidence, threshold) == Band::HIGH;
    if (high) {
      (*t.correct ? table.a : table.b) += 1;
    } else {
      (*t.correct ? table.c : table.d) += 1;
    }
  }
  return table;
}

std::size_t count_unjudged_parse_ok(const Cell& cell) {
  std::size_t n = 0;
  for (const auto& t : cell.trials) {
    if (t.parse_status == ParseStatus::OK && !t.correct) ++n;
  }
  return n;
}

}  // namespace confscreen
