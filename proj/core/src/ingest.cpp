#include "confscreen/ingest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace confscreen {

namespace {

using nlohmann::json;

constexpr char kAliasDelimiter = '|';

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "run_id",        "model_id",   "condition",      "item_id",
      "question",      "gold_aliases", "raw_response", "parsed_answer",
      "correct",       "confidence", "confidence_raw", "parse_status",
      "logprob_mean",  "trace_length", "seed"};
  return cols;
}

TrialRecord trial_from_json(const json& j) {
  TrialRecord t;
  t.run_id = j.at("run_id").get<std::string>();
  t.model_id = j.at("model_id").get<std::string>();
  const auto condition = condition_from_string(j.at("condition").get<std::string>());
  if (!condition) throw std::runtime_error("unknown condition");
  t.condition = *condition;
  t.item_id = j.at("item_id").get<std::string>();
  t.question = j.value("question", std::string());
  if (j.contains("gold_aliases")) {
    t.gold_aliases = j.at("gold_aliases").get<std::vector<std::string>>();
  }
  t.raw_response = j.value("raw_response", std::string());
  if (j.contains("parsed_answer")) t.parsed_answer = j.at("parsed_answer").get<std::string>();
  if (j.contains("correct")) t.correct = j.at("correct").get<bool>();
  if (j.contains("confidence")) t.confidence = j.at("confidence").get<double>();
  if (j.contains("confidence_raw")) t.confidence_raw = j.at("confidence_raw").get<std::string>();
  const auto status = parse_status_from_string(j.at("parse_status").get<std::string>());
  if (!status) throw std::runtime_error("unknown parse_status");
  t.parse_status = *status;
  if (j.contains("logprob_mean")) t.logprob_mean = j.at("logprob_mean").get<double>();
  if (j.contains("trace_length")) t.trace_length = j.at("trace_length").get<std::int64_t>();
  t.seed = j.value("seed", 42);

  const std::string violation = t.invariant_violation();
  if (!violation.empty()) throw std::runtime_error(violation);
  return t;
}

json trial_to_json(const TrialRecord& t) {
  json j;
  j["run_id"] = t.run_id;
  j["model_id"] = t.model_id;
  j["condition"] = to_string(t.condition);
  j["item_id"] = t.item_id;
  j["question"] = t.question;
  j["gold_aliases"] = t.gold_aliases;
  j["raw_response"] = t.raw_response;
  if (t.parsed_answer) j["parsed_answer"] = *t.parsed_answer;
  if (t.correct) j["correct"] = *t.correct;
  if (t.confidence) j["confidence"] = *t.confidence;
  if (t.confidence_raw) j["confidence_raw"] = *t.confidence_raw;
  j["parse_status"] = to_string(t.parse_status);
  if (t.logprob_mean) j["logprob_mean"] = *t.logprob_mean;
  if (t.trace_length) j["trace_length"] = *t.trace_length;
  j["seed"] = t.seed;
  return j;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV record (RFC 4180 quoting). Returns false on malformed quoting.
bool csv_split(const std::string& line, std::vector<std::string>& fields) {
  fields.clear();
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      if (!current.empty()) return false;
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) return false;
  fields.push_back(std::move(current));
  return true;
}

TrialRecord trial_from_csv(const std::vector<std::string>& fields) {
  if (fields.size() != csv_columns().size()) {
    throw std::runtime_error("wrong number of CSV fields");
  }
  TrialRecord t;
  t.run_id = fields[0];
  t.model_id = fields[1];
  const auto condition = condition_from_string(fields[2]);
  if (!condition) throw std::runtime_error("unknown condition");
  t.condition = *condition;
  t.item_id = fields[3];
  t.question = fields[4];
  if (!fields[5].empty()) {
    std::stringstream ss(fields[5]);
    std::string alias;
    while (std::getline(ss, alias, kAliasDelimiter)) t.gold_aliases.push_back(alias);
  }
  t.raw_response = fields[6];
  if (!fields[7].empty()) t.parsed_answer = fields[7];
  if (!fields[8].empty()) {
    if (fields[8] != "true" && fields[8] != "false") {
      throw std::runtime_error("correct must be true/false");
    }
    t.correct = fields[8] == "true";
  }
  if (!fields[9].empty()) t.confidence = std::stod(fields[9]);
  if (!fields[10].empty()) t.confidence_raw = fields[10];
  const auto status = parse_status_from_string(fields[11]);
  if (!status) throw std::runtime_error("unknown parse_status");
  t.parse_status = *status;
  if (!fields[12].empty()) t.logprob_mean = std::stod(fields[12]);
  if (!fields[13].empty()) t.trace_length = std::stoll(fields[13]);
  if (!fields[14].empty()) t.seed = std::stoi(fields[14]);

  const std::string violation = t.invariant_violation();
  if (!violation.empty()) throw std::runtime_error(violation);
  return t;
}

std::string trial_to_csv(const TrialRecord& t) {
  std::string aliases;
  for (std::size_t i = 0; i < t.gold_aliases.size(); ++i) {
    if (t.gold_aliases[i].find(kAliasDelimiter) != std::string::npos) {
      throw std::runtime_error("gold alias contains the reserved '|' delimiter");
    }
    if (i) aliases += kAliasDelimiter;
    aliases += t.gold_aliases[i];
  }
  std::ostringstream out;
  out << csv_escape(t.run_id) << ',' << csv_escape(t.model_id) << ','
      << to_string(t.condition) << ',' << csv_escape(t.item_id) << ','
      << csv_escape(t.question) << ',' << csv_escape(aliases) << ','
      << csv_escape(t.raw_response) << ','
      << csv_escape(t.parsed_answer.value_or("")) << ','
      << (t.correct ? (*t.correct ? "true" : "false") : "") << ',';
  if (t.confidence) out << json(*t.confidence).dump();
  out << ',' << csv_escape(t.confidence_raw.value_or("")) << ','
      << to_string(t.parse_status) << ',';
  if (t.logprob_mean) out << json(*t.logprob_mean).dump();
  out << ',';
  if (t.trace_length) out << *t.trace_length;
  out << ',' << t.seed;
  return out.str();
}

}  // namespace

ReadResult read_trials(std::istream& in, TrialFormat format) {
  ReadResult result;
  std::string line;
  std::size_t line_number = 0;
  std::size_t considered = 0;

  if (format == TrialFormat::CSV) {
    if (!std::getline(in, line)) return result;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    std::string expected;
    for (std::size_t i = 0; i < csv_columns().size(); ++i) {
      if (i) expected += ',';
      expected += csv_columns()[i];
    }
    if (line != expected) {
      throw std::runtime_error("CSV header does not match the trial schema");
    }
  }

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++considered;
    try {
      if (format == TrialFormat::JSONL) {
        result.trials.push_back(trial_from_json(json::parse(line)));
      } else {
        std::vector<std::string> fields;
        if (!csv_split(line, fields)) throw std::runtime_error("malformed CSV quoting");
        result.trials.push_back(trial_from_csv(fields));
      }
    } catch (const std::exception& e) {
      result.errors.push_back({line_number, e.what()});
    }
  }

  if (considered > 0 &&
      static_cast<double>(result.errors.size()) / static_cast<double>(considered) >
          0.01) {
    throw std::runtime_error(
        "too many invalid lines: " + std::to_string(result.errors.size()) + " of " +
        std::to_string(considered) + " (limit 1%); first error at line " +
        std::to_string(result.errors.front().line_number) + ": " +
        result.errors.front().message);
  }
  return result;
}

ReadResult read_trials(const std::filesystem::path& source, TrialFormat format) {
  std::ifstream in(source);
  if (!in) {
    throw std::runtime_error("cannot open trials file: " + source.string());
  }
  return read_trials(in, format);
}

std::string trial_to_json_line(const TrialRecord& trial) {
  return trial_to_json(trial).dump();
}

void write_trials(std::ostream& out, const std::vector<TrialRecord>& trials,
                  TrialFormat format) {
  if (format == TrialFormat::CSV) {
    for (std::size_t i = 0; i < csv_columns().size(); ++i) {
      if (i) out << ',';
      out << csv_columns()[i];
    }
    out << '\n';
    for (const auto& t : trials) out << trial_to_csv(t) << '\n';
  } else {
    for (const auto& t : trials) out << trial_to_json_line(t) << '\n';
  }
}

void write_trials(const std::filesystem::path& dest,
                  const std::vector<TrialRecord>& trials, TrialFormat format) {
  std::ofstream out(dest);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + dest.string());
  }
  write_trials(out, trials, format);
}

GroupResult group_cells(const std::vector<TrialRecord>& trials) {
  GroupResult result;
  std::map<std::pair<std::string, int>, std::vector<TrialRecord>> groups;
  for (const auto& t : trials) {
    groups[{t.model_id, static_cast<int>(t.condition)}].push_back(t);
  }
  for (auto& [key, group] : groups) {
    std::set<std::string> seen;
    for (const auto& t : group) {
      if (!seen.insert(t.item_id).second) {
        result.warnings.push_back("duplicate item '" + t.item_id + "' in cell " +
                                  key.first + "/" +
                                  to_string(static_cast<Condition>(key.second)));
      }
    }
    result.cells.push_back(Cell::from_trials(
        key.first, static_cast<Condition>(key.second), std::move(group)));
  }
  return result;
}

}  // namespace confscreen
