#pragma once
// Builders for the seven compositional-generalization splits per domain,
// few-shot fine-tune sets, and split audits.
//
// Train and test distributions are mutually exclusive by construction.
// Records are deduplicated by specification identity (command text for SCAN,
// the full I/O example list for RobustFill). When a stream provably runs out
// of distinct specifications (every rejection in a full attempt budget was a
// duplicate of an already-emitted record), the builder falls back to cycling
// through the accepted records deterministically instead of failing; SCAN
// has only 102 distinct length-1 commands, so e.g. a 10,000-record
// length-exactly-1 training split cannot be duplicate-free. The audit
// reports duplicate counts separately from predicate violations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compgen/decomp.hpp"
#include "compgen/sampling.hpp"

namespace compgen::splits {

using sample::Domain;

enum class Task {
  Length,
  LengthHard,
  LengthHardest,
  ComposeDifferentConcepts,
  SwitchConceptOrder,
  ComposeNewOperation,
  AddOperationFunctionality,
};

inline constexpr Task kAllTasks[] = {
    Task::Length,
    Task::LengthHard,
    Task::LengthHardest,
    Task::ComposeDifferentConcepts,
    Task::SwitchConceptOrder,
    Task::ComposeNewOperation,
    Task::AddOperationFunctionality,
};

inline std::string_view to_name(Task t) {
  switch (t) {
    case Task::Length: return "length";
    case Task::LengthHard: return "length-hard";
    case Task::LengthHardest: return "length-hardest";
    case Task::ComposeDifferentConcepts: return "compose-different-concepts";
    case Task::SwitchConceptOrder: return "switch-concept-order";
    case Task::ComposeNewOperation: return "compose-new-operation";
    case Task::AddOperationFunctionality: return "add-operation-functionality";
  }
  return "";
}

inline std::optional<Task> task_from_name(std::string_view s) {
  std::string normalized(s);
  for (char& c : normalized) {
    if (c == '_') c = '-';
  }
  for (Task t : kAllTasks) {
    if (to_name(t) == normalized) return t;
  }
  return std::nullopt;
}

enum class Role { Train, Test, Finetune };

inline std::string_view to_name(Role r) {
  switch (r) {
    case Role::Train: return "train";
    case Role::Test: return "test";
    case Role::Finetune: return "finetune";
  }
  return "";
}

inline std::optional<Role> role_from_name(std::string_view s) {
  if (s == "train") return Role::Train;
  if (s == "test") return Role::Test;
  if (s == "finetune") return Role::Finetune;
  return std::nullopt;
}

enum class Origin { TrainDist, TestDist };

inline std::string_view to_name(Origin o) {
  return o == Origin::TrainDist ? "train_dist" : "test_dist";
}

inline std::optional<Origin> origin_from_name(std::string_view s) {
  if (s == "train_dist") return Origin::TrainDist;
  if (s == "test_dist") return Origin::TestDist;
  return std::nullopt;
}

struct SplitSizes {
  int train = 10000;
  int test = 10000;
  int finetune_per_origin = 20;  // fine-tune sets are 20 + 20 by origin
};

struct SplitSpec {
  Domain domain = Domain::Scan;
  Task task = Task::Length;
  Role role = Role::Train;
  SplitSizes sizes;
  std::uint64_t seed = 0;
  // Upper part count for the length-hardest test distribution.
  int hardest_test_max = 6;
  int examples_per_task = 4;
  int input_len_min = 4;
  int input_len_max = 20;
};

// One benchmark record: specification, target token sequence (separators
// included), part spans over the separator-free tokens, and per-part concept
// labels in program order.
struct TaskInstance {
  Domain domain = Domain::Scan;
  Task task = Task::Length;
  Role role = Role::Train;
  Origin origin = Origin::TrainDist;
  std::string command;                  // SCAN specification
  std::vector<rf::IoExample> examples;  // RobustFill specification
  std::vector<std::string> target_tokens;
  std::vector<std::pair<std::size_t, std::size_t>> part_spans;
  int length = 0;
  std::vector<std::string> concept_labels;

  // Dedup identity: the surface specification, not the target program.
  std::string spec_key() const {
    if (domain == Domain::Scan) return command;
    std::string key;
    for (const rf::IoExample& ex : examples) {
      key += ex.input;
      key += '\x1f';
      key += ex.output;
      key += '\x1e';
    }
    return key;
  }
};

// ---------------------------------------------------------------------------
// Per-task generation profiles

struct GenProfile {
  std::vector<int> lengths;
  sample::ConstraintSet constraints;
  // All-one-concept training streams draw the concept side uniformly per
  // record (AllA flipped to AllB half the time).
  bool alternate_concepts = false;
};

namespace detail {

inline std::vector<int> length_run(int lo, int hi) {
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

}  // namespace detail

inline GenProfile distribution_profile(Domain domain, Task task, Origin dist,
                                       int hardest_test_max = 6) {
  using sample::ConceptPattern;
  const bool train = dist == Origin::TrainDist;
  GenProfile g;
  switch (task) {
    case Task::Length:
      g.lengths = train ? detail::length_run(1, 6) : detail::length_run(7, 10);
      break;
    case Task::LengthHard:
      if (train) {
        g.lengths = {6};
      } else {
        g.lengths = detail::length_run(1, 10);
        g.lengths.erase(std::find(g.lengths.begin(), g.lengths.end(), 6));
      }
      break;
    case Task::LengthHardest:
      g.lengths = train ? std::vector<int>{1} : detail::length_run(2, hardest_test_max);
      break;
    case Task::ComposeDifferentConcepts:
      g.lengths = detail::length_run(2, 6);
      if (train) {
        g.constraints.pattern = ConceptPattern::AllA;
        g.alternate_concepts = true;
      } else {
        g.constraints.pattern = ConceptPattern::Mixed;
      }
      break;
    case Task::SwitchConceptOrder:
      // Training composes concept A (left / substring) first; testing
      // reverses the order.
      g.lengths = detail::length_run(2, 6);
      g.constraints.pattern = train ? ConceptPattern::AThenB : ConceptPattern::BThenA;
      break;
    case Task::ComposeNewOperation:
      if (domain == Domain::Scan) {
        g.lengths = detail::length_run(1, 6);
        if (train) {
          g.constraints.forbidden = {"jump"};
          g.constraints.special_ratio = 0.10;
          g.constraints.special = sample::SpecialForm::ScanBareJump;
        } else {
          g.constraints.required = {"jump"};
          g.constraints.forbidden_exact = {"jump"};
        }
      } else {
        g.lengths = detail::length_run(2, 6);
        if (train) {
          g.constraints.forbidden = {"Compose"};
          g.constraints.special_ratio = 0.25;
          g.constraints.special = sample::SpecialForm::RfComposeOnly;
        } else {
          g.constraints.required = {"Compose"};
        }
      }
      break;
    case Task::AddOperationFunctionality:
      g.lengths = detail::length_run(1, 6);
      if (domain == Domain::Scan) {
        if (train) g.constraints.forbidden = {"around right"};
        else g.constraints.required = {"around right"};
      } else {
        if (train) g.constraints.forbidden = {"ComposeSubstring"};
        else g.constraints.required = {"ComposeSubstring"};
      }
      break;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Instance construction

inline TaskInstance make_scan_instance(const scan::Command& cmd, Task task, Role role,
                                       Origin origin) {
  const scan::ActionProgram prog = scan::translate(cmd);
  TaskInstance inst;
  inst.domain = Domain::Scan;
  inst.task = task;
  inst.role = role;
  inst.origin = origin;
  inst.command = scan::print_command(cmd);
  inst.part_spans = prog.part_spans;
  inst.length = static_cast<int>(prog.part_spans.size());
  for (const scan::Part& p : scan::part_phrases(cmd)) {
    inst.concept_labels.emplace_back(sample::to_label(sample::concept_of_scan_part(p)));
  }
  const decomp::SepSequence sep =
      decomp::insert_separators(scan::action_tokens(prog.tokens), prog.part_spans);
  inst.target_tokens = sep.tokens;
  return inst;
}

inline TaskInstance make_rf_instance(const rf::Program& program,
                                     std::vector<rf::IoExample> examples, Task task,
                                     Role role, Origin origin) {
  TaskInstance inst;
  inst.domain = Domain::RobustFill;
  inst.task = task;
  inst.role = role;
  inst.origin = origin;
  inst.examples = std::move(examples);
  std::vector<std::string> tokens;
  for (const rf::Expression& e : program.expressions) {
    const std::size_t begin = tokens.size();
    rf::append_tokens(e, tokens);
    inst.part_spans.emplace_back(begin, tokens.size());
    inst.concept_labels.emplace_back(
        sample::to_label(sample::concept_of_rf_expression(e)));
  }
  inst.length = static_cast<int>(program.expressions.size());
  const decomp::SepSequence sep = decomp::insert_separators(tokens, inst.part_spans);
  inst.target_tokens = sep.tokens;
  return inst;
}

// ---------------------------------------------------------------------------
// Distribution predicates (independent of the generator: everything is
// re-derived from the stored specification / target program text)

inline bool is_scan_special(const TaskInstance& inst) { return inst.command == "jump"; }

inline bool is_rf_special(const TaskInstance& inst) {
  try {
    const rf::Program p = rf::parse_program(decomp::strip_separators(inst.target_tokens));
    return p.expressions.size() == 1 &&
           std::holds_alternative<rf::Compose>(p.expressions.front());
  } catch (const rf::ParseError&) {
    return false;
  }
}

inline bool is_special_form(const TaskInstance& inst) {
  return inst.domain == Domain::Scan ? is_scan_special(inst) : is_rf_special(inst);
}

inline bool satisfies_distribution(const TaskInstance& inst, Domain domain, Task task,
                                   Origin dist, int hardest_test_max = 6) {
  const GenProfile profile = distribution_profile(domain, task, dist, hardest_test_max);
  if (task == Task::ComposeNewOperation && dist == Origin::TrainDist &&
      is_special_form(inst)) {
    return true;
  }
  if (domain == Domain::Scan) {
    scan::Command cmd;
    try {
      cmd = scan::parse_command(inst.command);
    } catch (const scan::ParseError&) {
      return false;
    }
    const int n = static_cast<int>(scan::part_count(cmd));
    if (std::find(profile.lengths.begin(), profile.lengths.end(), n) ==
        profile.lengths.end()) {
      return false;
    }
    if (profile.alternate_concepts) {
      auto all_a = profile.constraints;
      auto all_b = profile.constraints;
      all_b.pattern = sample::ConceptPattern::AllB;
      return sample::scan_satisfies(cmd, all_a) || sample::scan_satisfies(cmd, all_b);
    }
    return sample::scan_satisfies(cmd, profile.constraints);
  }
  rf::Program program;
  try {
    program = rf::parse_program(decomp::strip_separators(inst.target_tokens));
  } catch (const rf::ParseError&) {
    return false;
  }
  const int n = static_cast<int>(program.expressions.size());
  if (std::find(profile.lengths.begin(), profile.lengths.end(), n) ==
      profile.lengths.end()) {
    return false;
  }
  if (profile.alternate_concepts) {
    auto all_a = profile.constraints;
    auto all_b = profile.constraints;
    all_b.pattern = sample::ConceptPattern::AllB;
    return sample::rf_satisfies(program, all_a) || sample::rf_satisfies(program, all_b);
  }
  return sample::rf_satisfies(program, profile.constraints);
}

// ---------------------------------------------------------------------------
// Stream generation

namespace detail {

// Exact interleaving: record i is special iff floor((i+1)*r) > floor(i*r),
// which places floor(count * r) specials evenly through the stream.
inline bool special_slot(int i, double ratio) {
  if (ratio <= 0.0) return false;
  const auto at = [ratio](int k) {
    return static_cast<long long>(std::floor(static_cast<double>(k) * ratio + 1e-9));
  };
  return at(i + 1) > at(i);
}

inline std::vector<TaskInstance> generate_stream(
    const SplitSpec& spec, Origin dist, int count, Role role,
    std::string_view stream_label, const std::set<std::string>* excluded_keys) {
  const GenProfile profile =
      distribution_profile(spec.domain, spec.task, dist, spec.hardest_test_max);

  sample::SamplerConfig cfg;
  cfg.domain = spec.domain;
  cfg.lengths = profile.lengths;
  cfg.constraints = profile.constraints;
  cfg.examples_per_task = spec.examples_per_task;
  cfg.input_len_min = spec.input_len_min;
  cfg.input_len_max = spec.input_len_max;
  const std::string label = std::string(sample::to_name(spec.domain)) + "/" +
                            std::string(to_name(spec.task)) + "/" +
                            std::string(stream_label) + "/shard0";
  cfg.seed = derive_seed(spec.seed, label);

  std::optional<sample::ScanSampler> scan_sampler;
  std::optional<sample::RfSampler> rf_sampler;
  if (spec.domain == Domain::Scan) scan_sampler.emplace(cfg);
  else rf_sampler.emplace(cfg);
  Rng side_rng(derive_seed(cfg.seed, "concept-side"));

  std::vector<TaskInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  std::set<std::string> seen;
  std::vector<std::size_t> unique_indices;
  std::size_t cycle_next = 0;
  bool space_exhausted = false;

  for (int i = 0; i < count; ++i) {
    const bool special = special_slot(i, profile.constraints.special_ratio);

    sample::ConstraintSet cs = profile.constraints;
    if (profile.alternate_concepts && side_rng.index(2) == 1) {
      cs.pattern = sample::ConceptPattern::AllB;
    }

    std::optional<TaskInstance> accepted;
    bool saw_valid_duplicate = false;
    if (space_exhausted && !special) {
      saw_valid_duplicate = true;  // skip straight to cycling
    } else {
      for (int attempt = 0; attempt < sample::kRejectionBudget; ++attempt) {
        TaskInstance inst;
        if (spec.domain == Domain::Scan) {
          scan::Command cmd =
              special ? sample::ScanSampler::special_bare_jump() : scan_sampler->sample(cs);
          inst = make_scan_instance(cmd, spec.task, role, dist);
        } else {
          sample::RfSampler::Sample s =
              special ? rf_sampler->sample_special() : rf_sampler->sample(cs);
          inst = make_rf_instance(s.program, std::move(s.examples), spec.task, role, dist);
        }
        const std::string key = inst.spec_key();
        if (excluded_keys && excluded_keys->count(key)) {
          saw_valid_duplicate = true;
          continue;
        }
        if (seen.count(key)) {
          // Repeated bare-"jump" records are the one intentional duplicate.
          if (special && spec.domain == Domain::Scan) {
            accepted = std::move(inst);
            break;
          }
          saw_valid_duplicate = true;
          continue;
        }
        seen.insert(key);
        unique_indices.push_back(out.size());
        accepted = std::move(inst);
        break;
      }
    }

    if (!accepted) {
      if (saw_valid_duplicate && !unique_indices.empty()) {
        space_exhausted = true;
        accepted = out[unique_indices[cycle_next % unique_indices.size()]];
        ++cycle_next;
      } else {
        throw sample::GenerationError(
            "could not generate record " + std::to_string(i) + " for " + label);
      }
    }
    out.push_back(std::move(*accepted));
  }
  return out;
}

}  // namespace detail

// Emits sizes[role] instances for the spec's train or test role.
inline std::vector<TaskInstance> build_split(const SplitSpec& spec) {
  if (spec.role == Role::Finetune) {
    throw std::invalid_argument("build_split handles train/test; use build_finetune_set");
  }
  const bool train = spec.role == Role::Train;
  return detail::generate_stream(spec, train ? Origin::TrainDist : Origin::TestDist,
                                 train ? spec.sizes.train : spec.sizes.test, spec.role,
                                 train ? "train" : "test", nullptr);
}

inline std::set<std::string> spec_keys(const std::vector<TaskInstance>& instances) {
  std::set<std::string> keys;
  for (const TaskInstance& inst : instances) keys.insert(inst.spec_key());
  return keys;
}

// 20 train-distribution + 20 test-distribution records, disjoint from the
// test set by specification identity.
inline std::vector<TaskInstance> build_finetune_set(const SplitSpec& spec,
                                                    const std::set<std::string>& test_keys) {
  std::vector<TaskInstance> out =
      detail::generate_stream(spec, Origin::TrainDist, spec.sizes.finetune_per_origin,
                              Role::Finetune, "finetune-train", &test_keys);
  std::vector<TaskInstance> test_side =
      detail::generate_stream(spec, Origin::TestDist, spec.sizes.finetune_per_origin,
                              Role::Finetune, "finetune-test", &test_keys);
  out.insert(out.end(), std::make_move_iterator(test_side.begin()),
             std::make_move_iterator(test_side.end()));
  return out;
}

inline std::vector<TaskInstance> build_finetune_set(const SplitSpec& spec) {
  SplitSpec test_spec = spec;
  test_spec.role = Role::Test;
  return build_finetune_set(spec, spec_keys(build_split(test_spec)));
}

// ---------------------------------------------------------------------------
// Audit

// Buckets a record's per-part concept labels into a coarse signature for the
// histogram, e.g. "all-left", "substring-then-nonsubstring", "interleaved".
inline std::string concept_signature(Domain domain, const std::vector<std::string>& labels) {
  const std::string a{domain == Domain::Scan ? "left" : "substring"};
  const std::string b{domain == Domain::Scan ? "right" : "nonsubstring"};
  const std::string label_a = domain == Domain::Scan ? "LEFT" : "SUBSTRING";
  const std::string label_b = domain == Domain::Scan ? "RIGHT" : "NONSUBSTRING";
  const std::string other = domain == Domain::Scan ? "directionless" : "compose";
  bool has_a = false;
  bool has_b = false;
  for (const std::string& l : labels) {
    if (l == label_a) has_a = true;
    else if (l == label_b) has_b = true;
    else return "has-" + other;
  }
  if (has_a && !has_b) return "all-" + a;
  if (has_b && !has_a) return "all-" + b;
  auto is_block_order = [&](const std::string& first) {
    bool in_tail = false;
    for (const std::string& l : labels) {
      if (l == first && in_tail) return false;
      if (l != first) in_tail = true;
    }
    return true;
  };
  if (is_block_order(label_a)) return a + "-then-" + b;
  if (is_block_order(label_b)) return b + "-then-" + a;
  return "interleaved";
}

struct AuditReport {
  Domain domain = Domain::Scan;
  Task task = Task::Length;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  // Records violating their own distribution predicate.
  std::size_t train_violations = 0;
  std::size_t test_violations = 0;
  // Records that also satisfy the opposite predicate (must never happen:
  // the distributions are mutually exclusive).
  std::size_t cross_violations = 0;
  // Specification keys present in both streams.
  std::size_t overlap = 0;
  // Duplicate specifications within a role; intentional bare-"jump" repeats
  // and space-exhaustion cycling are counted here but are not violations.
  std::size_t train_duplicates = 0;
  std::size_t test_duplicates = 0;
  // compose-new-operation only: count of special-form train records and the
  // exact count the interleaving schedule demands.
  std::size_t special_count = 0;
  std::size_t special_expected = 0;
  std::map<int, std::size_t> train_length_hist;
  std::map<int, std::size_t> test_length_hist;
  std::map<std::string, std::size_t> train_concept_hist;
  std::map<std::string, std::size_t> test_concept_hist;

  bool clean() const {
    return train_violations == 0 && test_violations == 0 && cross_violations == 0 &&
           overlap == 0 && special_count == special_expected;
  }
};

inline AuditReport audit_split(const std::vector<TaskInstance>& train,
                               const std::vector<TaskInstance>& test,
                               int hardest_test_max = 6) {
  AuditReport report;
  const TaskInstance* probe = !train.empty() ? &train.front()
                              : !test.empty() ? &test.front()
                                              : nullptr;
  if (probe) {
    report.domain = probe->domain;
    report.task = probe->task;
  }
  report.train_size = train.size();
  report.test_size = test.size();

  const double ratio =
      distribution_profile(report.domain, report.task, Origin::TrainDist, hardest_test_max)
          .constraints.special_ratio;
  report.special_expected =
      static_cast<std::size_t>(std::floor(static_cast<double>(train.size()) * ratio + 1e-9));

  std::set<std::string> train_keys;
  std::set<std::string> test_keys;
  for (const TaskInstance& inst : train) {
    if (!satisfies_distribution(inst, report.domain, report.task, Origin::TrainDist,
                                hardest_test_max)) {
      ++report.train_violations;
    }
    if (satisfies_distribution(inst, report.domain, report.task, Origin::TestDist,
                               hardest_test_max)) {
      ++report.cross_violations;
    }
    if (report.task == Task::ComposeNewOperation && is_special_form(inst)) {
      ++report.special_count;
    }
    if (!train_keys.insert(inst.spec_key()).second) ++report.train_duplicates;
    ++report.train_length_hist[inst.length];
    ++report.train_concept_hist[concept_signature(report.domain, inst.concept_labels)];
  }
  for (const TaskInstance& inst : test) {
    if (!satisfies_distribution(inst, report.domain, report.task, Origin::TestDist,
                                hardest_test_max)) {
      ++report.test_violations;
    }
    if (satisfies_distribution(inst, report.domain, report.task, Origin::TrainDist,
                               hardest_test_max)) {
      ++report.cross_violations;
    }
    if (!test_keys.insert(inst.spec_key()).second) ++report.test_duplicates;
    ++report.test_length_hist[inst.length];
    ++report.test_concept_hist[concept_signature(report.domain, inst.concept_labels)];
  }
  for (const std::string& key : train_keys) {
    if (test_keys.count(key)) ++report.overlap;
  }
  if (report.task != Task::ComposeNewOperation) {
    report.special_expected = 0;
    report.special_count = 0;
  }
  return report;
}

inline std::string to_text(const AuditReport& r) {
  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) {
    out += "  ";
    out += k;
    for (std::size_t i = k.size(); i < 28; ++i) out += ' ';
    out += v;
    out += '\n';
  };
  out += "audit: ";
  out += to_name(r.domain);
  out += " / ";
  out += to_name(r.task);
  out += '\n';
  line("train size", std::to_string(r.train_size));
  line("test size", std::to_string(r.test_size));
  line("train violations", std::to_string(r.train_violations));
  line("test violations", std::to_string(r.test_violations));
  line("cross violations", std::to_string(r.cross_violations));
  line("train/test overlap", std::to_string(r.overlap));
  line("train duplicates", std::to_string(r.train_duplicates));
  line("test duplicates", std::to_string(r.test_duplicates));
  if (r.task == Task::ComposeNewOperation) {
    line("special records",
         std::to_string(r.special_count) + " (expected " +
             std::to_string(r.special_expected) + ")");
  }
  auto hist = [&](const char* name, const std::map<int, std::size_t>& h) {
    std::string v;
    for (const auto& [len, count] : h) {
      if (!v.empty()) v += "  ";
      v += std::to_string(len) + ":" + std::to_string(count);
    }
    line(name, v);
  };
  hist("train lengths", r.train_length_hist);
  hist("test lengths", r.test_length_hist);
  auto concept_hist = [&](const char* name, const std::map<std::string, std::size_t>& h) {
    std::string v;
    for (const auto& [sig, count] : h) {
      if (!v.empty()) v += "  ";
      v += sig + ":" + std::to_string(count);
    }
    line(name, v);
  };
  concept_hist("train concepts", r.train_concept_hist);
  concept_hist("test concepts", r.test_concept_hist);
  line("verdict", r.clean() ? "clean" : "VIOLATIONS FOUND");
  return out;
}

}  // namespace compgen::splits
