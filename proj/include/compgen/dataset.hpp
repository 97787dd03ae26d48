#pragma once
// JSONL dataset records: content-digest ids, serialization, and deep record
// validation. One record per line, UTF-8, keys in fixed order so identical
// generator configs produce byte-identical files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "compgen/decomp.hpp"
#include "compgen/rng.hpp"
#include "compgen/splits.hpp"

namespace compgen::data {

inline constexpr std::string_view kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;
using splits::Domain;

inline std::string fnv1a_hex(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  const std::uint64_t h = fnv1a64(s);
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kHex[(h >> (4 * i)) & 0xF];
  }
  return out;
}

// Stable record id: a digest of (domain, specification).
inline std::string instance_id(const splits::TaskInstance& inst) {
  std::string blob{sample::to_name(inst.domain)};
  blob += '\x1f';
  blob += inst.spec_key();
  return fnv1a_hex(blob);
}

// Digest over every generation-relevant parameter; changes iff one of them
// changes.
inline std::string config_digest(const splits::SplitSpec& spec) {
  std::string blob;
  blob += sample::to_name(spec.domain);
  blob += '|';
  blob += splits::to_name(spec.task);
  blob += '|';
  blob += std::to_string(spec.seed);
  blob += '|';
  blob += std::to_string(spec.sizes.train);
  blob += '|';
  blob += std::to_string(spec.sizes.test);
  blob += '|';
  blob += std::to_string(spec.sizes.finetune_per_origin);
  blob += '|';
  blob += std::to_string(spec.hardest_test_max);
  blob += '|';
  blob += std::to_string(spec.examples_per_task);
  blob += '|';
  blob += std::to_string(spec.input_len_min);
  blob += '|';
  blob += std::to_string(spec.input_len_max);
  return fnv1a_hex(blob);
}

struct GeneratorMeta {
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string config_digest;

  bool operator==(const GeneratorMeta&) const = default;
};

struct DatasetRecord {
  std::string id;
  splits::TaskInstance instance;
  GeneratorMeta meta;
};

inline DatasetRecord make_record(splits::TaskInstance inst, const splits::SplitSpec& spec) {
  DatasetRecord r;
  r.id = instance_id(inst);
  r.instance = std::move(inst);
  r.meta = GeneratorMeta{spec.seed, std::string(kToolVersion), config_digest(spec)};
  return r;
}

inline std::vector<DatasetRecord> make_records(std::vector<splits::TaskInstance> instances,
                                               const splits::SplitSpec& spec) {
  std::vector<DatasetRecord> out;
  out.reserve(instances.size());
  for (splits::TaskInstance& inst : instances) out.push_back(make_record(std::move(inst), spec));
  return out;
}

inline Json record_to_json(const DatasetRecord& r) {
  const splits::TaskInstance& inst = r.instance;
  Json spec_obj = Json::object();
  if (inst.domain == Domain::Scan) {
    spec_obj["command"] = inst.command;
  } else {
    Json examples = Json::array();
    for (const rf::IoExample& ex : inst.examples) {
      examples.push_back(Json{{"input", ex.input}, {"output", ex.output}});
    }
    spec_obj["examples"] = std::move(examples);
  }
  Json spans = Json::array();
  for (const auto& [begin, end] : inst.part_spans) {
    spans.push_back(Json::array({begin, end}));
  }
  Json j = Json::object();
  j["id"] = r.id;
  j["domain"] = sample::to_name(inst.domain);
  j["task"] = splits::to_name(inst.task);
  j["role"] = splits::to_name(inst.role);
  j["spec"] = std::move(spec_obj);
  j["target_tokens"] = inst.target_tokens;
  j["part_spans"] = std::move(spans);
  j["length"] = inst.length;
  j["concept_labels"] = inst.concept_labels;
  j["origin"] = splits::to_name(inst.origin);
  j["generator_meta"] = Json{{"seed", r.meta.seed},
                             {"tool_version", r.meta.tool_version},
                             {"config_digest", r.meta.config_digest}};
  return j;
}

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline DatasetRecord record_from_json(const Json& j) {
  DatasetRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    const auto domain = sample::domain_from_name(j.at("domain").get<std::string>());
    if (!domain) throw SchemaError("unknown domain");
    r.instance.domain = *domain;
    const auto task = splits::task_from_name(j.at("task").get<std::string>());
    if (!task) throw SchemaError("unknown task");
    r.instance.task = *task;
    const auto role = splits::role_from_name(j.at("role").get<std::string>());
    if (!role) throw SchemaError("unknown role");
    r.instance.role = *role;
    const Json& spec_obj = j.at("spec");
    if (r.instance.domain == Domain::Scan) {
      r.instance.command = spec_obj.at("command").get<std::string>();
    } else {
      for (const Json& ex : spec_obj.at("examples")) {
        r.instance.examples.push_back(rf::IoExample{ex.at("input").get<std::string>(),
                                                    ex.at("output").get<std::string>()});
      }
    }
    r.instance.target_tokens = j.at("target_tokens").get<std::vector<std::string>>();
    for (const Json& span : j.at("part_spans")) {
      if (!span.is_array() || span.size() != 2) throw SchemaError("bad part span");
      r.instance.part_spans.emplace_back(span[0].get<std::size_t>(),
                                         span[1].get<std::size_t>());
    }
    r.instance.length = j.at("length").get<int>();
    r.instance.concept_labels = j.at("concept_labels").get<std::vector<std::string>>();
    const auto origin = splits::origin_from_name(j.at("origin").get<std::string>());
    if (!origin) throw SchemaError("unknown origin");
    r.instance.origin = *origin;
    const Json& meta = j.at("generator_meta");
    r.meta.seed = meta.at("seed").get<std::uint64_t>();
    r.meta.tool_version = meta.at("tool_version").get<std::string>();
    r.meta.config_digest = meta.at("config_digest").get<std::string>();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed record: ") + e.what());
  }
  return r;
}

inline void write_jsonl(const std::filesystem::path& path,
                        const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const DatasetRecord& r : records) {
    out << record_to_json(r).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline std::vector<DatasetRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// Deep integrity check; returns one message per problem, empty when clean.
inline std::vector<std::string> validate_record(const DatasetRecord& r) {
  std::vector<std::string> problems;
  const splits::TaskInstance& inst = r.instance;

  if (r.id != instance_id(inst)) problems.push_back("id does not match the spec digest");
  if (r.meta.tool_version.empty()) problems.push_back("missing tool version");

  const std::vector<std::string> stripped = decomp::strip_separators(inst.target_tokens);
  if (inst.length != static_cast<int>(inst.part_spans.size())) {
    problems.push_back("length does not equal the number of part spans");
  }
  if (inst.concept_labels.size() != inst.part_spans.size()) {
    problems.push_back("concept label count does not equal the number of part spans");
  }
  std::size_t cursor = 0;
  bool spans_ok = true;
  for (const auto& [begin, end] : inst.part_spans) {
    if (begin != cursor || end <= begin || end > stripped.size()) {
      spans_ok = false;
      break;
    }
    cursor = end;
  }
  if (!spans_ok || cursor != stripped.size()) {
    problems.push_back("part spans do not tile the separator-free tokens");
    return problems;
  }
  const decomp::SepSequence sep = decomp::insert_separators(stripped, inst.part_spans);
  if (sep.tokens != inst.target_tokens) {
    problems.push_back("target tokens are not in canonical separator form");
  }

  if (inst.domain == Domain::Scan) {
    try {
      const scan::Command cmd = scan::parse_command(inst.command);
      const scan::ActionProgram prog = scan::translate(cmd);
      if (scan::action_tokens(prog.tokens) != stripped) {
        problems.push_back("retranslating the command does not reproduce the target");
      }
      if (prog.part_spans != inst.part_spans) {
        problems.push_back("part spans disagree with the translation");
      }
      std::vector<std::string> labels;
      for (const scan::Part& p : scan::part_phrases(cmd)) {
        labels.emplace_back(sample::to_label(sample::concept_of_scan_part(p)));
      }
      if (labels != inst.concept_labels) {
        problems.push_back("concept labels disagree with the command");
      }
    } catch (const scan::ParseError& e) {
      problems.push_back(std::string("command does not parse: ") + e.what());
    }
  } else {
    if (inst.examples.empty()) problems.push_back("no I/O examples");
    for (const rf::IoExample& ex : inst.examples) {
      if (ex.input.empty()) problems.push_back("empty example input");
      for (char c : ex.input) {
        if (!rf::is_string_char(c)) {
          problems.push_back("example input outside the alphabet");
          break;
        }
      }
      for (char c : ex.output) {
        if (!rf::is_string_char(c)) {
          problems.push_back("example output outside the alphabet");
          break;
        }
      }
    }
    try {
      const rf::Program program = rf::parse_program(stripped);
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      std::vector<std::string> labels;
      std::vector<std::string> tokens;
      for (const rf::Expression& e : program.expressions) {
        const std::size_t begin = tokens.size();
        rf::append_tokens(e, tokens);
        spans.emplace_back(begin, tokens.size());
        labels.emplace_back(sample::to_label(sample::concept_of_rf_expression(e)));
      }
      if (tokens != stripped) {
        problems.push_back("program does not retokenize to the target");
      }
      if (spans != inst.part_spans) {
        problems.push_back("part spans disagree with the expression boundaries");
      }
      if (labels != inst.concept_labels) {
        problems.push_back("concept labels disagree with the program");
      }
      if (!rf::satisfies(program, inst.examples)) {
        problems.push_back("program does not satisfy its own examples");
      }
    } catch (const rf::ParseError& e) {
      problems.push_back(std::string("target does not parse: ") + e.what());
    }
  }
  return problems;
}

inline Json audit_to_json(const splits::AuditReport& r) {
  Json j = Json::object();
  j["domain"] = sample::to_name(r.domain);
  j["task"] = splits::to_name(r.task);
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["train_violations"] = r.train_violations;
  j["test_violations"] = r.test_violations;
  j["cross_violations"] = r.cross_violations;
  j["overlap"] = r.overlap;
  j["train_duplicates"] = r.train_duplicates;
  j["test_duplicates"] = r.test_duplicates;
  j["special_count"] = r.special_count;
  j["special_expected"] = r.special_expected;
  auto hist_json = [](const std::map<int, std::size_t>& h) {
    Json out = Json::object();
    for (const auto& [k, v] : h) out[std::to_string(k)] = v;
    return out;
  };
  j["train_length_hist"] = hist_json(r.train_length_hist);
  j["test_length_hist"] = hist_json(r.test_length_hist);
  auto concept_json = [](const std::map<std::string, std::size_t>& h) {
    Json out = Json::object();
    for (const auto& [k, v] : h) out[k] = v;
    return out;
  };
  j["train_concept_hist"] = concept_json(r.train_concept_hist);
  j["test_concept_hist"] = concept_json(r.test_concept_hist);
  j["clean"] = r.clean();
  return j;
}

}  // namespace compgen::data
