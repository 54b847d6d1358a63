#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "confscreen/trial.hpp"

namespace confscreen {

// Elicitation system prompts, emitted on the wire byte-for-byte.
const std::string& num_system_prompt();
const std::string& cat_system_prompt();
// Answer turn of the two-turn CAT exchange.
const std::string& cat_answer_system_prompt();

// Ordinal class labels, index 0 ("No chance") to 9 ("Almost certain").
const std::array<std::string, 10>& categorical_class_labels();

struct Item {
  std::string item_id;
  std::string question;
  std::vector<std::string> gold_aliases;  // at least one
};

// JSONL items file: item_id, question, gold_aliases. Throws on any bad line.
std::vector<Item> read_items(const std::filesystem::path& path);

struct CollectorConfig {
  std::string endpoint;  // base URL of a chat-completions style server
  std::string model;
  Condition condition = Condition::NUM;
  double temperature = 0.0;
  int seed = 42;
  double timeout_s = 60.0;
  int retries = 3;
  int backoff_ms = 250;
  int top_logprobs = 5;
  int parallelism = 1;
  std::string run_id;  // empty: derived from model, condition, seed
  std::filesystem::path items_path;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
};

// Last standalone number in [0,100] adjacent to a confidence marker
// ("confidence", "%", "percent"); falls back to the only bare in-range number.
// Returns the value divided by 100.
std::optional<double> parse_numeric_confidence(const std::string& text);

// Case-insensitive, word-boundary match against the 10 class labels;
// longest match wins, equal-length ties between distinct labels are ambiguous.
std::optional<int> parse_categorical_confidence(const std::string& text);

// Lowercase, strip punctuation and the articles a/an/the, collapse whitespace.
std::string normalize_answer(const std::string& text);

// True iff the normalised answer equals a normalised alias or contains one as
// a contiguous full-token subsequence.
bool judge_correctness(const std::string& parsed_answer,
                       const std::vector<std::string>& gold_aliases);

// Mean chosen-token logprob over tokens overlapping [span_begin, span_end)
// of the concatenated token text. Empty token list or no overlap -> absent.
std::optional<double> extract_logprob_mean(const std::vector<TokenLogprob>& tokens,
                                           std::size_t span_begin,
                                           std::size_t span_end);

// Character count of content inside <think>/<thinking> blocks; absent when no
// opening marker exists. An unclosed block counts to the end of the text.
std::optional<std::int64_t> reasoning_trace_length(const std::string& text);

// Text with reasoning blocks removed (used before answer extraction).
std::string strip_reasoning(const std::string& text);

// Administers one elicitation condition over all items and assembles trial
// records in item order. Endpoint unreachable on the first request aborts;
// later per-item failures degrade to ANSWER_PARSE_FAIL records.
std::vector<TrialRecord> run_condition(const CollectorConfig& config,
                                       const std::vector<Item>& items);

}  // namespace confscreen
