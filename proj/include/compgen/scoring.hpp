#pragma once
// Scoring of predicted programs against benchmark records. SCAN predictions
// are exact-match on the separator-free action sequence; RobustFill
// predictions count as correct when the parsed program satisfies every I/O
// example, even if it differs from the generating program. Separators in a
// prediction never affect the verdict.

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "compgen/dataset.hpp"
#include "compgen/decomp.hpp"
#include "compgen/robustfill.hpp"

namespace compgen::score {

using splits::Domain;

enum class FailureKind { None, ParseError, ExecFailure, WrongOutput, TokenMismatch };

struct Verdict {
  bool correct = false;
  FailureKind failure = FailureKind::None;
};

inline Verdict score_scan(const splits::TaskInstance& inst,
                          const std::vector<std::string>& predicted_tokens) {
  const auto want = decomp::strip_separators(inst.target_tokens);
  const auto got = decomp::strip_separators(predicted_tokens);
  if (want == got) return {true, FailureKind::None};
  return {false, FailureKind::TokenMismatch};
}

inline Verdict score_rf(const splits::TaskInstance& inst,
                        const std::vector<std::string>& predicted_tokens) {
  rf::Program program;
  try {
    program = rf::parse_program(decomp::strip_separators(predicted_tokens));
  } catch (const rf::ParseError&) {
    return {false, FailureKind::ParseError};
  }
  for (const rf::IoExample& ex : inst.examples) {
    const auto out = rf::eval_program(program, ex.input);
    if (!out) return {false, FailureKind::ExecFailure};
    if (*out != ex.output) return {false, FailureKind::WrongOutput};
  }
  return {true, FailureKind::None};
}

inline Verdict score_instance(const splits::TaskInstance& inst,
                              const std::vector<std::string>& predicted_tokens) {
  return inst.domain == Domain::Scan ? score_scan(inst, predicted_tokens)
                                     : score_rf(inst, predicted_tokens);
}

struct Prediction {
  std::string instance_id;
  std::vector<std::string> predicted_tokens;
};

struct Tally {
  std::size_t total = 0;
  std::size_t correct = 0;

  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

struct ScoreReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t parse_errors = 0;
  std::size_t exec_failures = 0;
  std::size_t wrong_outputs = 0;
  std::size_t token_mismatches = 0;
  std::map<int, Tally> per_length;
  std::map<std::string, Tally> per_task;

  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
};

class ScoreInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Aggregates verdicts over a dataset. Every record id must have exactly one
// prediction; records sharing an id (intentional repeats in some training
// streams) share that prediction.
inline ScoreReport score_file(const std::vector<data::DatasetRecord>& records,
                              const std::vector<Prediction>& predictions) {
  std::map<std::string, const Prediction*> by_id;
  for (const Prediction& p : predictions) {
    if (!by_id.emplace(p.instance_id, &p).second) {
      throw ScoreInputError("duplicate prediction for id " + p.instance_id);
    }
  }
  std::map<std::string, bool> referenced;
  for (const data::DatasetRecord& r : records) referenced[r.id] = false;
  for (const Prediction& p : predictions) {
    const auto it = referenced.find(p.instance_id);
    if (it == referenced.end()) {
      throw ScoreInputError("prediction references unknown id " + p.instance_id);
    }
  }

  ScoreReport report;
  for (const data::DatasetRecord& r : records) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      throw ScoreInputError("missing prediction for id " + r.id);
    }
    const Verdict v = score_instance(r.instance, it->second->predicted_tokens);
    ++report.total;
    Tally& by_length = report.per_length[r.instance.length];
    Tally& by_task = report.per_task[std::string(splits::to_name(r.instance.task))];
    ++by_length.total;
    ++by_task.total;
    if (v.correct) {
      ++report.correct;
      ++by_length.correct;
      ++by_task.correct;
      continue;
    }
    switch (v.failure) {
      case FailureKind::ParseError: ++report.parse_errors; break;
      case FailureKind::ExecFailure: ++report.exec_failures; break;
      case FailureKind::WrongOutput: ++report.wrong_outputs; break;
      case FailureKind::TokenMismatch: ++report.token_mismatches; break;
      case FailureKind::None: break;
    }
  }
  return report;
}

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

inline std::string to_text(const ScoreReport& r) {
  std::string out;
  out += "accuracy: " + format_percent(r.accuracy()) + " (" + std::to_string(r.correct) +
         "/" + std::to_string(r.total) + ")\n";
  out += "failures: parse_error=" + std::to_string(r.parse_errors) +
         " exec_failure=" + std::to_string(r.exec_failures) +
         " wrong_output=" + std::to_string(r.wrong_outputs) +
         " token_mismatch=" + std::to_string(r.token_mismatches) + "\n";
  out += "per length:\n";
  for (const auto& [len, tally] : r.per_length) {
    out += "  " + std::to_string(len) + ": " + format_percent(tally.accuracy()) + " (" +
           std::to_string(tally.correct) + "/" + std::to_string(tally.total) + ")\n";
  }
  out += "per task:\n";
  for (const auto& [task, tally] : r.per_task) {
    out += "  " + task + ": " + format_percent(tally.accuracy()) + " (" +
           std::to_string(tally.correct) + "/" + std::to_string(tally.total) + ")\n";
  }
  return out;
}

inline data::Json report_to_json(const ScoreReport& r) {
  data::Json j = data::Json::object();
  j["total"] = r.total;
  j["correct"] = r.correct;
  j["accuracy"] = r.accuracy();
  j["parse_errors"] = r.parse_errors;
  j["exec_failures"] = r.exec_failures;
  j["wrong_outputs"] = r.wrong_outputs;
  j["token_mismatches"] = r.token_mismatches;
  data::Json per_length = data::Json::object();
  for (const auto& [len, tally] : r.per_length) {
    per_length[std::to_string(len)] =
        data::Json{{"total", tally.total}, {"correct", tally.correct}};
  }
  j["per_length"] = std::move(per_length);
  data::Json per_task = data::Json::object();
  for (const auto& [task, tally] : r.per_task) {
    per_task[task] = data::Json{{"total", tally.total}, {"correct", tally.correct}};
  }
  j["per_task"] = std::move(per_task);
  return j;
}

// Predictions interchange format: JSONL of {"instance_id", "predicted_tokens"}.
inline void write_predictions(const std::filesystem::path& path,
                              const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const Prediction& p : predictions) {
    data::Json j = data::Json::object();
    j["instance_id"] = p.instance_id;
    j["predicted_tokens"] = p.predicted_tokens;
    out << j.dump() << '\n';
  }
}

inline std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const data::Json j = data::Json::parse(line);
      out.push_back(Prediction{j.at("instance_id").get<std::string>(),
                               j.at("predicted_tokens").get<std::vector<std::string>>()});
    } catch (const std::exception& e) {
      throw data::SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace compgen::score
