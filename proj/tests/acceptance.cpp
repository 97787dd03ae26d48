// Acceptance suite: exercises the generation, semantics, and structural
// guarantees end to end at full scale and prints one PASS/FAIL line per
// criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "compgen/dataset.hpp"
#include "compgen/scoring.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace compgen;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

// ---------------------------------------------------------------------------
// Full-scale generation pass shared by criteria 5, 6, and 9.

struct SplitOutcome {
  std::string name;
  bool sizes_ok = false;
  splits::AuditReport report;
  bool ratio_ok = true;
  bool finetune_shape_ok = false;
  bool finetune_disjoint_ok = false;
  bool echo_perfect = false;
  std::size_t echo_total = 0;
};

struct GenerationPass {
  bool ran = false;
  double seconds = 0;
  std::vector<SplitOutcome> outcomes;
};

GenerationPass& full_pass() {
  static GenerationPass pass;
  if (pass.ran) return pass;
  const auto start = Clock::now();
  for (sample::Domain domain : {sample::Domain::Scan, sample::Domain::RobustFill}) {
    for (splits::Task task : splits::kAllTasks) {
      splits::SplitSpec spec;
      spec.domain = domain;
      spec.task = task;
      spec.seed = 7;
      spec.sizes.train = 10000;
      spec.sizes.test = 10000;

      SplitOutcome outcome;
      outcome.name = std::string(sample::to_name(domain)) + "/" +
                     std::string(splits::to_name(task));

      spec.role = splits::Role::Train;
      const std::vector<splits::TaskInstance> train = splits::build_split(spec);
      spec.role = splits::Role::Test;
      const std::vector<splits::TaskInstance> test = splits::build_split(spec);
      outcome.sizes_ok = train.size() == 10000 && test.size() == 10000;
      outcome.report = splits::audit_split(train, test);

      if (task == splits::Task::ComposeNewOperation) {
        const std::size_t expected = domain == sample::Domain::Scan ? 1000 : 2500;
        outcome.ratio_ok = outcome.report.special_count == expected;
      }

      const std::set<std::string> test_keys = splits::spec_keys(test);
      spec.role = splits::Role::Finetune;
      const std::vector<splits::TaskInstance> finetune =
          splits::build_finetune_set(spec, test_keys);
      std::size_t train_dist = 0;
      std::size_t test_dist = 0;
      bool disjoint = true;
      for (const splits::TaskInstance& inst : finetune) {
        (inst.origin == splits::Origin::TrainDist ? train_dist : test_dist) += 1;
        disjoint = disjoint && !test_keys.count(inst.spec_key());
      }
      outcome.finetune_shape_ok =
          finetune.size() == 40 && train_dist == 20 && test_dist == 20;
      outcome.finetune_disjoint_ok = disjoint;

      // Echo the ground-truth targets back through the scorer.
      const std::vector<data::DatasetRecord> records = data::make_records(test, spec);
      std::vector<score::Prediction> echo;
      echo.reserve(records.size());
      for (const data::DatasetRecord& r : records) {
        echo.push_back({r.id, r.instance.target_tokens});
      }
      const score::ScoreReport scored = score::score_file(records, echo);
      outcome.echo_total = scored.total;
      outcome.echo_perfect = scored.total == records.size() &&
                             scored.correct == scored.total && scored.accuracy() == 1.0;

      pass.outcomes.push_back(std::move(outcome));
    }
  }
  pass.seconds = seconds_since(start);
  pass.ran = true;
  return pass;
}

// ---------------------------------------------------------------------------
// Criteria

void criterion_translation_fidelity(Check& check) {
  const scan::Command cmd =
      scan::parse_command("jump left twice and run right after walk thrice");
  const auto start = Clock::now();
  const scan::ActionProgram prog = scan::translate(cmd);
  const double elapsed_ms = seconds_since(start) * 1000.0;
  const std::string got = text::join(scan::action_tokens(prog.tokens), " ");
  check.expect(got == "WALK WALK WALK LTURN JUMP LTURN JUMP RTURN RUN",
               "translation mismatch: " + got);
  const std::vector<std::pair<std::size_t, std::size_t>> spans = {{0, 3}, {3, 7}, {7, 9}};
  check.expect(prog.part_spans == spans, "span mismatch");
  check.expect(elapsed_ms < 1.0,
               "translation took " + std::to_string(elapsed_ms) + " ms (budget 1 ms)");
}

void criterion_precedence_fidelity(Check& check) {
  const auto prog = scan::translate(scan::parse_command("jump and run after walk"));
  const std::string got = text::join(scan::action_tokens(prog.tokens), " ");
  check.expect(got == "WALK JUMP RUN", "translation mismatch: " + got);
}

void criterion_scan_oracle_sweep(Check& check) {
  const auto start = Clock::now();
  const std::vector<std::string> phrases = oracle::all_scan_phrases();
  check.expect(phrases.size() == 102,
               "expected 102 single-part commands, got " + std::to_string(phrases.size()));
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  const auto compare = [&](const std::string& command) {
    ++cases;
    const auto expected = oracle::scan_command_actions(command);
    std::string got;
    try {
      got = text::join(
          scan::action_tokens(scan::translate(scan::parse_command(command)).tokens), " ");
    } catch (const scan::ParseError&) {
      ++mismatches;
      return;
    }
    if (!expected || got != *expected) {
      if (++mismatches <= 3) {
        check.expect(false, "mismatch on '" + command + "': got '" + got + "' want '" +
                                (expected ? *expected : "<none>") + "'");
      }
    }
  };
  for (const std::string& p : phrases) compare(p);
  for (const std::string& a : phrases) {
    for (const std::string& b : phrases) {
      compare(a + " and " + b);
      compare(a + " after " + b);
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(mismatches == 0, std::to_string(mismatches) + " mismatches over " +
                                    std::to_string(cases) + " commands");
  check.expect(cases == 102 + 2 * 102 * 102, "unexpected case count");
  check.expect(elapsed < 60.0, "sweep took " + std::to_string(elapsed) + " s (budget 60)");
}

void criterion_rf_semantics(Check& check) {
  const auto mismatches = oracle::compare_operators(/*seed=*/424242, /*cases_per_op=*/1000);
  for (const std::string& m : mismatches) check.expect(false, m);

  sample::SamplerConfig cfg;
  cfg.domain = sample::Domain::RobustFill;
  cfg.seed = 99;
  cfg.lengths = {1, 2, 3, 4, 5, 6};
  sample::RfSampler sampler(cfg);
  std::size_t bad = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = sampler.sample();
    if (!rf::satisfies(s.program, s.examples)) ++bad;
  }
  check.expect(bad == 0,
               std::to_string(bad) + " sampled pairs fail their own specification");
}

void criterion_split_audits(Check& check) {
  const GenerationPass& pass = full_pass();
  for (const SplitOutcome& o : pass.outcomes) {
    check.expect(o.sizes_ok, o.name + ": wrong stream sizes");
    check.expect(o.report.train_violations == 0,
                 o.name + ": " + std::to_string(o.report.train_violations) +
                     " train predicate violations");
    check.expect(o.report.test_violations == 0,
                 o.name + ": " + std::to_string(o.report.test_violations) +
                     " test predicate violations");
    check.expect(o.report.cross_violations == 0,
                 o.name + ": " + std::to_string(o.report.cross_violations) +
                     " records satisfy the opposite predicate");
    check.expect(o.report.overlap == 0,
                 o.name + ": " + std::to_string(o.report.overlap) +
                     " overlapping specifications");
    check.expect(o.ratio_ok, o.name + ": special ratio " +
                                 std::to_string(o.report.special_count) + " != expected " +
                                 std::to_string(o.report.special_expected));
  }
  check.expect(pass.seconds < 600.0, "generation pass took " +
                                         std::to_string(pass.seconds) +
                                         " s (budget 600)");
  std::cout << "       (generated 14 x 20,040 records in " << pass.seconds << " s)\n";
}

void criterion_finetune_protocol(Check& check) {
  for (const SplitOutcome& o : full_pass().outcomes) {
    check.expect(o.finetune_shape_ok, o.name + ": fine-tune set is not 20+20 by origin");
    check.expect(o.finetune_disjoint_ok, o.name + ": fine-tune set intersects the test set");
  }
}

void criterion_mask_properties(Check& check) {
  using decomp::MaskVariant;
  Rng rng(2718281828);
  std::size_t causal_bad = 0;
  std::size_t empty_rows = 0;
  std::size_t chain_bad = 0;
  std::size_t variant_bad = 0;
  std::size_t oracle_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const int parts = rng.range(1, 8);
    std::vector<std::string> tokens;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (int p = 0; p < parts; ++p) {
      const std::size_t begin = tokens.size();
      for (int t = rng.range(1, 6); t > 0; --t) tokens.push_back("x");
      spans.emplace_back(begin, tokens.size());
    }
    const decomp::SepSequence seq = decomp::insert_separators(tokens, spans);
    const std::size_t length = seq.tokens.size();
    const auto full = decomp::build_mask(seq, MaskVariant::SepFull);
    const auto sep_last = decomp::build_mask(seq, MaskVariant::SepToSepAndLast);
    const auto last = decomp::build_mask(seq, MaskVariant::SepToLast);
    const std::set<std::size_t> seps(seq.sep_positions.begin(), seq.sep_positions.end());
    for (std::size_t q = 0; q < length; ++q) {
      bool any = false;
      for (std::size_t k = 0; k < length; ++k) {
        if (k > q && (full.allow[q][k] || sep_last.allow[q][k] || last.allow[q][k])) {
          ++causal_bad;
        }
        any = any || last.allow[q][k];
        if (last.allow[q][k] && !sep_last.allow[q][k]) ++chain_bad;
        if (sep_last.allow[q][k] && !full.allow[q][k]) ++chain_bad;
        if (!seps.count(q) && (full.allow[q][k] != sep_last.allow[q][k] ||
                               full.allow[q][k] != last.allow[q][k])) {
          ++variant_bad;
        }
      }
      if (!any) ++empty_rows;
    }
    if (i < 1000) {  // oracle comparison on a large random subset
      for (MaskVariant v : decomp::kMaskVariants) {
        if (decomp::build_mask(seq, v).allow !=
            oracle::mask_rows(length, seq.sep_positions, v)) {
          ++oracle_bad;
        }
      }
    }
  }
  check.expect(causal_bad == 0, std::to_string(causal_bad) + " non-causal entries");
  check.expect(empty_rows == 0, std::to_string(empty_rows) + " empty rows");
  check.expect(chain_bad == 0, std::to_string(chain_bad) + " subset-chain breaks");
  check.expect(variant_bad == 0,
               std::to_string(variant_bad) + " variant-dependent non-separator rows");
  check.expect(oracle_bad == 0,
               std::to_string(oracle_bad) + " random masks disagree with the reference");

  // Exhaustive comparison for every wrapped sequence of length <= 8.
  std::size_t exhaustive = 0;
  std::size_t exhaustive_bad = 0;
  for (const auto& part_sizes : oracle::all_part_size_lists(8)) {
    std::vector<std::string> tokens;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (std::size_t size : part_sizes) {
      const std::size_t begin = tokens.size();
      for (std::size_t t = 0; t < size; ++t) tokens.push_back("x");
      spans.emplace_back(begin, tokens.size());
    }
    const decomp::SepSequence seq = decomp::insert_separators(tokens, spans);
    for (MaskVariant v : decomp::kMaskVariants) {
      ++exhaustive;
      if (decomp::build_mask(seq, v).allow !=
          oracle::mask_rows(seq.tokens.size(), seq.sep_positions, v)) {
        ++exhaustive_bad;
      }
    }
  }
  check.expect(exhaustive > 0, "no exhaustive sequences enumerated");
  check.expect(exhaustive_bad == 0, std::to_string(exhaustive_bad) + " of " +
                                        std::to_string(exhaustive) +
                                        " exhaustive masks disagree");
}

void criterion_bucketing(Check& check) {
  check.expect(decomp::relpos_bucket(0, true) == 0, "bucket(0) is not 0 (bidirectional)");
  check.expect(decomp::relpos_bucket(0, false) == 0, "bucket(0) is not 0 (decoder)");
  for (std::int64_t d = 0; d < 2000; ++d) {
    if (decomp::relpos_bucket(d, true) > decomp::relpos_bucket(d + 1, true) ||
        decomp::relpos_bucket(-d, true) > decomp::relpos_bucket(-d - 1, true)) {
      check.expect(false, "not monotone at |d|=" + std::to_string(d));
      break;
    }
  }
  for (std::int64_t d = 128; d <= 4096; ++d) {
    if (decomp::relpos_bucket(d, true) != decomp::relpos_bucket(128, true) ||
        decomp::relpos_bucket(-d, true) != decomp::relpos_bucket(-128, true)) {
      check.expect(false, "not constant beyond the maximum distance at d=" +
                              std::to_string(d));
      break;
    }
  }
  std::set<int> ids;
  for (std::int64_t d = -512; d <= 512; ++d) ids.insert(decomp::relpos_bucket(d, true));
  check.expect(ids.size() == 32, "bidirectional mode uses " + std::to_string(ids.size()) +
                                     " distinct ids, want 32");
}

void criterion_scoring(Check& check) {
  for (const SplitOutcome& o : full_pass().outcomes) {
    check.expect(o.echo_perfect && o.echo_total == 10000,
                 o.name + ": echoed ground truth does not score 100.0%");
  }

  // Corrupting exactly half of a fresh split scores exactly 50.0%.
  splits::SplitSpec spec;
  spec.domain = sample::Domain::Scan;
  spec.task = splits::Task::Length;
  spec.role = splits::Role::Test;
  spec.sizes.test = 10000;
  spec.seed = 7;
  const auto records = data::make_records(splits::build_split(spec), spec);
  std::vector<score::Prediction> predictions;
  predictions.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    score::Prediction p{records[i].id, records[i].instance.target_tokens};
    if (i % 2 == 0) p.predicted_tokens.push_back("WALK");  // corrupt every other one
    predictions.push_back(std::move(p));
  }
  const score::ScoreReport halved = score::score_file(records, predictions);
  check.expect(halved.total == 10000, "unexpected scored total");
  check.expect(halved.correct * 2 == halved.total,
               "corrupting half scored " + std::to_string(halved.correct) + "/" +
                   std::to_string(halved.total));
  check.expect(score::format_percent(halved.accuracy()) == "50.0%",
               "accuracy renders as " + score::format_percent(halved.accuracy()));

  // A functionally equivalent but different program counts as correct.
  splits::TaskInstance inst = splits::make_rf_instance(
      rf::parse_program_text("SubStr 2 2"), {{"abc", "b"}, {"xbz", "b"}},
      splits::Task::Length, splits::Role::Test, splits::Origin::TestDist);
  inst.domain = sample::Domain::RobustFill;
  const score::Verdict equivalent = score::score_rf(inst, {"GetToken", "CHAR", "2"});
  check.expect(equivalent.correct, "equivalent program was not scored correct");
  const score::Verdict different = score::score_rf(inst, {"ConstStr", "z"});
  check.expect(!different.correct, "wrong program was scored correct");
}

void criterion_determinism(Check& check) {
  const fs::path base = fs::temp_directory_path();
  const fs::path dir_a = base / "compgen_accept_det_a";
  const fs::path dir_b = base / "compgen_accept_det_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  const auto run = [&](const std::string& args) {
    const std::string command = std::string(COMPGEN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };

  for (const std::string& flags :
       {std::string("gen --domain scan --task length --train-size 500 --test-size 500 "
                    "--seed 13 --out "),
        std::string("gen --domain robustfill --task compose-new-operation --train-size 400 "
                    "--test-size 300 --seed 13 --out ")}) {
    check.expect(run(flags + dir_a.string()) == 0, "first run failed: " + flags);
    check.expect(run(flags + dir_b.string()) == 0, "second run failed: " + flags);
  }

  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const fs::path other = dir_b / entry.path().filename();
    check.expect(fs::exists(other), "missing file " + other.string());
    if (fs::exists(other)) {
      ++compared;
      check.expect(slurp(entry.path()) == slurp(other),
                   "files differ: " + entry.path().filename().string());
    }
  }
  check.expect(compared == 10, "expected 10 files, compared " + std::to_string(compared));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "command translation fidelity (three-part example)", criterion_translation_fidelity},
      {2, "conjunction precedence fidelity", criterion_precedence_fidelity},
      {3, "exhaustive two-part translation sweep vs rewrite table", criterion_scan_oracle_sweep},
      {4, "string-operation semantics vs straight-line reference", criterion_rf_semantics},
      {5, "full-scale split audits (7 tasks x 2 domains)", criterion_split_audits},
      {6, "fine-tune protocol shape (20+20, disjoint from test)", criterion_finetune_protocol},
      {7, "attention-mask properties and reference equality", criterion_mask_properties},
      {8, "relative-position bucketing", criterion_bucketing},
      {9, "end-to-end scoring", criterion_scoring},
      {10, "byte-identical regeneration", criterion_determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    Check check;
    const auto start = Clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (check.failures.empty()) {
      std::printf("[PASS] %2d. %s (%.2f s)\n", c.id, c.name.c_str(), elapsed);
    } else {
      ++failed;
      std::printf("[FAIL] %2d. %s (%.2f s)\n", c.id, c.name.c_str(), elapsed);
      for (const std::string& f : check.failures) {
        std::printf("       - %s\n", f.c_str());
      }
    }
    std::fflush(stdout);
  }
  if (failed == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", failed);
  return 1;
}
