#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace confscreen {

enum class Condition { NUM, CAT };

enum class ParseStatus { OK, CONFIDENCE_PARSE_FAIL, ANSWER_PARSE_FAIL };

enum class Band { HIGH, LOW };

const char* to_string(Condition c);
const char* to_string(ParseStatus s);
std::optional<Condition> condition_from_string(const std::string& s);
std::optional<ParseStatus> parse_status_from_string(const std::string& s);

// One elicitation trial. Confidence is normalised to [0,1]: numeric percent
// divided by 100, categorical class k mapped to its bin midpoint (k+0.5)/10.
struct TrialRecord {
  std::string run_id;
  std::string model_id;
  Condition condition = Condition::NUM;
  std::string item_id;
  std::string question;
  std::vector<std::string> gold_aliases;
  std::string raw_response;
  std::optional<std::string> parsed_answer;
  std::optional<bool> correct;
  std::optional<double> confidence;
  std::optional<std::string> confidence_raw;
  ParseStatus parse_status = ParseStatus::OK;
  std::optional<double> logprob_mean;
  std::optional<std::int64_t> trace_length;
  int seed = 42;

  bool operator==(const TrialRecord&) const = default;

  // Empty on success, otherwise a description of the violated invariant
  // (confidence present iff parse_status OK, confidence in [0,1], ...).
  std::string invariant_violation() const;
};

// All trials for one model x condition pair; the unit of screening.
struct Cell {
  std::string model_id;
  Condition condition = Condition::NUM;
  std::vector<TrialRecord> trials;
  std::size_t n_total = 0;
  std::size_t n_parse_ok = 0;
  std::size_t n_correct = 0;  // among parse-ok trials

  static Cell from_trials(std::string model_id, Condition condition,
                          std::vector<TrialRecord> trials);

  // Recomputes the counts from the stored trials.
  void recount();

  std::string invariant_violation() const;
};

// 2x2 counts after binarisation: a high & correct, b high & incorrect,
// c low & correct, d low & incorrect.
struct ContingencyTable {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;

  std::int64_t total() const { return a + b + c + d; }
  std::int64_t n_high() const { return a + b; }
  std::int64_t n_low() const { return c + d; }
  std::int64_t min_count() const;

  bool operator==(const ContingencyTable&) const = default;
};

// HIGH iff confidence >= threshold. Throws on out-of-range input.
Band binarize(double confidence, double threshold = 0.5);

// Midpoint of ordinal class k (k = 0..9) on the unit interval.
double categorical_midpoint(int class_index);

// Counts parse-ok trials with known correctness; everything else is skipped.
ContingencyTable build_contingency(const Cell& cell, double threshold = 0.5);

// Parse-ok trials whose correctness is unknown (flagged in reports, excluded
// from contingency counts).
std::size_t count_unjudged_parse_ok(const Cell& cell);

}  // namespace confscreen
