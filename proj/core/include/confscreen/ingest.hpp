#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "confscreen/trial.hpp"

namespace confscreen {

enum class TrialFormat { JSONL, CSV };

struct LineError {
  std::size_t line_number = 0;
  std::string message;
};

struct ReadResult {
  std::vector<TrialRecord> trials;
  std::vector<LineError> errors;
};

// Reads trials from a file. Invalid lines are collected with line numbers;
// the read fails (throws) only when more than 1% of non-blank lines are bad,
// the file is missing, or a CSV header violates the schema.
ReadResult read_trials(const std::filesystem::path& source, TrialFormat format);
ReadResult read_trials(std::istream& in, TrialFormat format);

void write_trials(const std::filesystem::path& dest,
                  const std::vector<TrialRecord>& trials, TrialFormat format);
void write_trials(std::ostream& out, const std::vector<TrialRecord>& trials,
                  TrialFormat format);

// Single-trial JSONL codecs (canonical schema; absent optionals omitted).
std::string trial_to_json_line(const TrialRecord& trial);

struct GroupResult {
  std::vector<Cell> cells;  // sorted by (model_id, condition)
  std::vector<std::string> warnings;
};

// One cell per distinct (model_id, condition); duplicate item_ids within a
// cell are flagged but kept.
GroupResult group_cells(const std::vector<TrialRecord>& trials);

}  // namespace confscreen
