// Command-line entry point: dataset generation, DSL execution, attention-mask
// rendering, scoring, split audits, and dataset statistics.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "compgen/dataset.hpp"
#include "compgen/scoring.hpp"

namespace fs = std::filesystem;
using namespace compgen;

namespace {

sample::Domain parse_domain(const std::string& name) {
  const auto d = sample::domain_from_name(name);
  if (!d) throw CLI::ValidationError("--domain", "unknown domain '" + name + "'");
  return *d;
}

splits::Task parse_task(const std::string& name) {
  const auto t = splits::task_from_name(name);
  if (!t) throw CLI::ValidationError("--task", "unknown task '" + name + "'");
  return *t;
}

std::string file_stem(const splits::SplitSpec& spec) {
  std::string task_name(splits::to_name(spec.task));
  for (char& c : task_name) {
    if (c == '-') c = '_';
  }
  return std::string(sample::to_name(spec.domain)) + "_" + task_name;
}

struct GenOptions {
  std::string domain;
  std::string task;
  std::uint64_t seed = 0;
  int train_size = 10000;
  int test_size = 10000;
  int finetune_size = 20;
  std::string out_dir = ".";
  int hardest_test_max = 6;
  int examples_per_task = 4;
  int input_min = 4;
  int input_max = 20;
};

int run_gen(const GenOptions& o) {
  splits::SplitSpec spec;
  spec.domain = parse_domain(o.domain);
  spec.task = parse_task(o.task);
  spec.seed = o.seed;
  spec.sizes.train = o.train_size;
  spec.sizes.test = o.test_size;
  spec.sizes.finetune_per_origin = o.finetune_size;
  spec.hardest_test_max = o.hardest_test_max;
  spec.examples_per_task = o.examples_per_task;
  spec.input_len_min = o.input_min;
  spec.input_len_max = o.input_max;

  fs::create_directories(o.out_dir);
  const fs::path base = fs::path(o.out_dir) / file_stem(spec);

  spec.role = splits::Role::Train;
  std::vector<splits::TaskInstance> train = splits::build_split(spec);
  spec.role = splits::Role::Test;
  std::vector<splits::TaskInstance> test = splits::build_split(spec);
  spec.role = splits::Role::Finetune;
  std::vector<splits::TaskInstance> finetune =
      splits::build_finetune_set(spec, splits::spec_keys(test));

  const splits::AuditReport report =
      splits::audit_split(train, test, spec.hardest_test_max);

  data::write_jsonl(base.string() + "_train.jsonl", data::make_records(std::move(train), spec));
  data::write_jsonl(base.string() + "_test.jsonl", data::make_records(std::move(test), spec));
  data::write_jsonl(base.string() + "_finetune.jsonl",
                    data::make_records(std::move(finetune), spec));

  {
    std::ofstream txt(base.string() + "_audit.txt", std::ios::binary);
    txt << splits::to_text(report);
    std::ofstream json(base.string() + "_audit.json", std::ios::binary);
    json << data::audit_to_json(report).dump(2) << '\n';
  }

  std::cout << splits::to_text(report);
  std::cout << "wrote " << base.string() << "_{train,test,finetune}.jsonl\n";
  return report.clean() ? 0 : 1;
}

int run_exec(const std::string& domain_name, const std::string& program_text,
             const std::string& input_text) {
  const sample::Domain domain = parse_domain(domain_name);
  if (domain == sample::Domain::Scan) {
    const scan::Command cmd = scan::parse_command(program_text);
    std::cout << text::join(scan::action_tokens(scan::translate(cmd).tokens), " ") << '\n';
    return 0;
  }
  const rf::Program program = rf::parse_program_text(program_text);
  const auto out = rf::eval_program(program, input_text);
  if (!out) {
    const int failed = rf::first_failing_expression(program, input_text);
    std::cout << "failure: expression " << failed + 1 << " of "
              << program.expressions.size() << " failed on this input\n";
    return 1;
  }
  std::cout << *out << '\n';
  return 0;
}

int run_mask(const std::string& variant_name, const std::string& tokens_text) {
  const auto variant = decomp::mask_variant_from_name(variant_name);
  if (!variant) {
    throw CLI::ValidationError("--variant", "unknown mask variant '" + variant_name + "'");
  }
  const std::vector<std::string> tokens = text::split_ws(tokens_text);
  const decomp::MaskMatrix mask =
      decomp::build_mask(tokens.size(), decomp::separator_positions(tokens), *variant);
  std::cout << "dense:\n" << decomp::to_dense_text(mask);
  std::cout << "sparse:\n" << decomp::to_sparse_text(mask);
  return 0;
}

int run_score(const std::string& dataset_path, const std::string& predictions_path,
              const std::string& json_path) {
  const std::vector<data::DatasetRecord> records = data::read_jsonl(dataset_path);
  const std::vector<score::Prediction> predictions =
      score::read_predictions(predictions_path);
  const score::ScoreReport report = score::score_file(records, predictions);
  std::cout << score::to_text(report);
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + json_path + " for writing");
    out << score::report_to_json(report).dump(2) << '\n';
  }
  return 0;
}

int run_audit(const std::string& train_path, const std::string& test_path,
              int hardest_test_max) {
  const std::vector<data::DatasetRecord> train = data::read_jsonl(train_path);
  const std::vector<data::DatasetRecord> test = data::read_jsonl(test_path);

  std::size_t record_problems = 0;
  auto validate_all = [&record_problems](const std::vector<data::DatasetRecord>& records,
                                         const std::string& label) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto problems = data::validate_record(records[i]);
      for (const std::string& p : problems) {
        if (++record_problems <= 20) {
          std::cerr << label << " record " << i << " (" << records[i].id << "): " << p
                    << '\n';
        }
      }
    }
  };
  validate_all(train, "train");
  validate_all(test, "test");

  std::vector<splits::TaskInstance> train_instances;
  train_instances.reserve(train.size());
  for (const auto& r : train) train_instances.push_back(r.instance);
  std::vector<splits::TaskInstance> test_instances;
  test_instances.reserve(test.size());
  for (const auto& r : test) test_instances.push_back(r.instance);

  const splits::AuditReport report =
      splits::audit_split(train_instances, test_instances, hardest_test_max);
  std::cout << splits::to_text(report);
  std::cout << "record problems: " << record_problems << '\n';
  return report.clean() && record_problems == 0 ? 0 : 1;
}

int run_stats(const std::string& dataset_path) {
  const std::vector<data::DatasetRecord> records = data::read_jsonl(dataset_path);
  std::map<std::string, std::size_t> by_group;
  std::map<int, std::size_t> by_length;
  std::map<std::string, std::size_t> by_concept;
  for (const auto& r : records) {
    const auto& inst = r.instance;
    by_group[std::string(sample::to_name(inst.domain)) + "/" +
             std::string(splits::to_name(inst.task)) + "/" +
             std::string(splits::to_name(inst.role)) + "/" +
             std::string(splits::to_name(inst.origin))]++;
    by_length[inst.length]++;
    by_concept[splits::concept_signature(inst.domain, inst.concept_labels)]++;
  }
  std::cout << "records: " << records.size() << '\n';
  std::cout << "groups:\n";
  for (const auto& [k, v] : by_group) std::cout << "  " << k << ": " << v << '\n';
  std::cout << "lengths:\n";
  for (const auto& [k, v] : by_length) std::cout << "  " << k << ": " << v << '\n';
  std::cout << "concepts:\n";
  for (const auto& [k, v] : by_concept) std::cout << "  " << k << ": " << v << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compgen: compositional-generalization benchmark toolkit for the SCAN "
               "and RobustFill domains"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  GenOptions gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "Generate train/test/fine-tune splits plus an audit");
  gen->add_option("--domain", gen_opts.domain, "scan or robustfill")->required();
  gen->add_option("--task", gen_opts.task,
                  "length, length-hard, length-hardest, compose-different-concepts, "
                  "switch-concept-order, compose-new-operation, add-operation-functionality")
      ->required();
  gen->add_option("--seed", gen_opts.seed, "root RNG seed")->capture_default_str();
  gen->add_option("--train-size", gen_opts.train_size)->capture_default_str();
  gen->add_option("--test-size", gen_opts.test_size)->capture_default_str();
  gen->add_option("--finetune-size", gen_opts.finetune_size,
                  "fine-tune records per origin (train-dist and test-dist)")
      ->capture_default_str();
  gen->add_option("--out", gen_opts.out_dir, "output directory")
      ->envname("COMPGEN_OUT")
      ->capture_default_str();
  gen->add_option("--hardest-test-max", gen_opts.hardest_test_max,
                  "upper part count for the length-hardest test split")
      ->capture_default_str();
  gen->add_option("--examples-per-task", gen_opts.examples_per_task)->capture_default_str();
  gen->add_option("--input-min", gen_opts.input_min)->capture_default_str();
  gen->add_option("--input-max", gen_opts.input_max)->capture_default_str();

  std::string exec_domain;
  std::string exec_program;
  std::string exec_input;
  CLI::App* exec = app.add_subcommand(
      "exec", "Translate a SCAN command or run a RobustFill program on an input");
  exec->add_option("--domain", exec_domain, "scan or robustfill")->required();
  exec->add_option("program", exec_program, "command / program text")->required();
  exec->add_option("--input", exec_input, "input string (robustfill)");

  std::string translate_command;
  CLI::App* translate =
      app.add_subcommand("translate", "Translate a SCAN command to its action sequence");
  translate->add_option("command", translate_command, "SCAN command text")->required();

  std::string mask_variant = "sep-full";
  std::string mask_tokens;
  CLI::App* mask = app.add_subcommand(
      "mask", "Print the decoder self-attention mask for a separator-tagged sequence");
  mask->add_option("--variant", mask_variant,
                   "sep-full, sep-to-sep-and-last, or sep-to-last")
      ->capture_default_str();
  mask->add_option("tokens", mask_tokens, "token sequence, e.g. \"SEP WALK SEP\"")
      ->required();

  std::string score_dataset;
  std::string score_predictions;
  std::string score_json;
  CLI::App* score_cmd = app.add_subcommand("score", "Score a predictions file against a dataset");
  score_cmd->add_option("--dataset", score_dataset)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--predictions", score_predictions)
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--json", score_json, "also write the report as a JSON record");

  std::string audit_train;
  std::string audit_test;
  int audit_hardest_max = 6;
  CLI::App* audit =
      app.add_subcommand("audit", "Validate records and audit a train/test split pair");
  audit->add_option("--train", audit_train)->required()->check(CLI::ExistingFile);
  audit->add_option("--test", audit_test)->required()->check(CLI::ExistingFile);
  audit->add_option("--hardest-test-max", audit_hardest_max)->capture_default_str();

  std::string stats_dataset;
  CLI::App* stats = app.add_subcommand("stats", "Summarize a dataset file");
  stats->add_option("--dataset", stats_dataset)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_opts);
    if (exec->parsed()) return run_exec(exec_domain, exec_program, exec_input);
    if (translate->parsed()) return run_exec("scan", translate_command, "");
    if (mask->parsed()) return run_mask(mask_variant, mask_tokens);
    if (score_cmd->parsed()) return run_score(score_dataset, score_predictions, score_json);
    if (audit->parsed()) return run_audit(audit_train, audit_test, audit_hardest_max);
    if (stats->parsed()) return run_stats(stats_dataset);
  } catch (const scan::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const rf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
