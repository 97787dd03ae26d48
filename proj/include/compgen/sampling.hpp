#pragma once
// Seeded, constraint-guided random generation of SCAN commands and
// RobustFill (program, I/O example) pairs. Samplers own a private
// deterministic RNG stream: the same config always yields the same stream.
//
// Forbidden names and concept patterns narrow the choice sets directly;
// required names, mixed-concept presence, and exact-form exclusions are
// enforced by rejection under a fixed attempt budget. RobustFill inputs are
// seeded with one guaranteed match per referenced (type, index) before
// being filled with random tokens, then checked by actually evaluating the
// program.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compgen/rng.hpp"
#include "compgen/robustfill.hpp"
#include "compgen/scan.hpp"
#include "compgen/text.hpp"

namespace compgen::sample {

enum class Domain { Scan, RobustFill };

inline std::string_view to_name(Domain d) {
  return d == Domain::Scan ? "scan" : "robustfill";
}

inline std::optional<Domain> domain_from_name(std::string_view s) {
  if (s == "scan") return Domain::Scan;
  if (s == "robustfill") return Domain::RobustFill;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Concepts

enum class ScanConcept { Left, Right, None };
enum class RfConcept { Substring, NonSubstring, Compose };

inline ScanConcept concept_of_scan_part(const scan::Part& p) {
  if (p.modifier == scan::Modifier::None) return ScanConcept::None;
  return p.direction == scan::Direction::Left ? ScanConcept::Left : ScanConcept::Right;
}

inline RfConcept concept_of_rf_expression(const rf::Expression& e) {
  if (std::holds_alternative<rf::SubstringOp>(e)) return RfConcept::Substring;
  if (std::holds_alternative<rf::Compose>(e)) return RfConcept::Compose;
  return RfConcept::NonSubstring;  // modification or constant string
}

inline std::string_view to_label(ScanConcept c) {
  switch (c) {
    case ScanConcept::Left: return "LEFT";
    case ScanConcept::Right: return "RIGHT";
    case ScanConcept::None: return "NONE";
  }
  return "";
}

inline std::string_view to_label(RfConcept c) {
  switch (c) {
    case RfConcept::Substring: return "SUBSTRING";
    case RfConcept::NonSubstring: return "NONSUBSTRING";
    case RfConcept::Compose: return "COMPOSE";
  }
  return "";
}

// Concept A is LEFT / SUBSTRING, concept B is RIGHT / NONSUBSTRING. Patterns
// other than Any exclude parts outside both concepts (directionless phrases,
// Compose expressions). Patterns are stated over parts in program
// (execution) order.
enum class ConceptPattern { Any, AllA, AllB, Mixed, AThenB, BThenA };

enum class SpecialForm { None, ScanBareJump, RfComposeOnly };

// Declarative restrictions every emitted sample must satisfy. `required`
// and `forbidden` hold operator / phrase names (see mentions_of).
// `special_ratio` is read by split builders that interleave fixed-form
// records into a stream; the samplers themselves only provide the special
// generator.
struct ConstraintSet {
  std::set<std::string> required;
  std::set<std::string> forbidden;
  std::set<std::string> forbidden_exact;  // full command text, rejected verbatim
  ConceptPattern pattern = ConceptPattern::Any;
  double special_ratio = 0.0;
  SpecialForm special = SpecialForm::None;
};

struct SamplerConfig {
  std::uint64_t seed = 0;
  Domain domain = Domain::Scan;
  std::vector<int> lengths = {1, 2, 3, 4, 5, 6};  // allowed part counts, drawn uniformly
  ConstraintSet constraints;
  int examples_per_task = 4;  // RobustFill only
  int input_len_min = 4;      // RobustFill input size bounds (may be exceeded
  int input_len_max = 20;     // when seeded requirements demand more)
};

inline constexpr int kRejectionBudget = 1000;
inline constexpr int kInputBudget = 50;

class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& message, std::string partial = {})
      : std::runtime_error(message), partial_(std::move(partial)) {}

  // Last attempted sample, for diagnostics.
  const std::string& partial() const { return partial_; }

 private:
  std::string partial_;
};

// ---------------------------------------------------------------------------
// Constraint predicates. These re-derive everything from the AST so they can
// double as an independent check on generator output.

// Names a part answers to when matched against required/forbidden sets: its
// verb, its direction, its modifier-direction phrase, and its repetition
// word. E.g. "jump around right twice" mentions {jump, right, around right,
// twice}.
inline std::vector<std::string> mentions_of(const scan::Part& p) {
  std::vector<std::string> out{std::string(scan::to_word(p.verb))};
  if (p.modifier != scan::Modifier::None) {
    out.emplace_back(scan::to_word(p.direction));
    if (p.modifier == scan::Modifier::Opposite) {
      out.push_back("opposite " + std::string(scan::to_word(p.direction)));
    } else if (p.modifier == scan::Modifier::Around) {
      out.push_back("around " + std::string(scan::to_word(p.direction)));
    }
  }
  if (p.repetition == scan::Repetition::Twice) out.emplace_back("twice");
  if (p.repetition == scan::Repetition::Thrice) out.emplace_back("thrice");
  return out;
}

// Operator names an expression answers to, plus the synthetic names
// "Compose" and "ComposeSubstring" (a substring operation nested inside a
// Compose).
inline std::vector<std::string> mentions_of(const rf::Expression& e) {
  std::vector<std::string> out;
  if (const rf::SubstringOp* s = std::get_if<rf::SubstringOp>(&e)) {
    out.emplace_back(rf::op_name(*s));
  } else if (const rf::ModificationOp* m = std::get_if<rf::ModificationOp>(&e)) {
    out.emplace_back(rf::op_name(*m));
  } else if (std::holds_alternative<rf::ConstStr>(e)) {
    out.emplace_back("ConstStr");
  } else {
    const rf::Compose& o = std::get<rf::Compose>(e);
    out.emplace_back("Compose");
    out.emplace_back(rf::op_name(o.outer));
    if (const rf::ModificationOp* m = std::get_if<rf::ModificationOp>(&o.inner)) {
      out.emplace_back(rf::op_name(*m));
    } else {
      out.emplace_back(rf::op_name(std::get<rf::SubstringOp>(o.inner)));
      out.emplace_back("ComposeSubstring");
    }
  }
  return out;
}

namespace detail {

inline bool pattern_ok(ConceptPattern pattern, const std::vector<int>& concept_ab) {
  // concept_ab holds 0 for concept A, 1 for concept B, -1 for neither, per
  // part in program order.
  if (pattern == ConceptPattern::Any) return true;
  const std::size_t n = concept_ab.size();
  for (int c : concept_ab) {
    if (c < 0) return false;
  }
  switch (pattern) {
    case ConceptPattern::AllA:
      return std::all_of(concept_ab.begin(), concept_ab.end(), [](int c) { return c == 0; });
    case ConceptPattern::AllB:
      return std::all_of(concept_ab.begin(), concept_ab.end(), [](int c) { return c == 1; });
    case ConceptPattern::Mixed: {
      bool a = false;
      bool b = false;
      for (int c : concept_ab) (c == 0 ? a : b) = true;
      return a && b;
    }
    case ConceptPattern::AThenB:
    case ConceptPattern::BThenA: {
      if (n < 2) return false;
      const std::size_t head = (n + 1) / 2;  // odd lengths: ceil(n/2) leading parts
      const int first = pattern == ConceptPattern::AThenB ? 0 : 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (concept_ab[i] != (i < head ? first : 1 - first)) return false;
      }
      return true;
    }
    default: return true;
  }
}

inline bool names_ok(const std::set<std::string>& mentioned, const ConstraintSet& cs) {
  for (const std::string& f : cs.forbidden) {
    if (mentioned.count(f)) return false;
  }
  for (const std::string& r : cs.required) {
    if (!mentioned.count(r)) return false;
  }
  return true;
}

}  // namespace detail

inline bool scan_satisfies(const scan::Command& c, const ConstraintSet& cs) {
  if (!cs.forbidden_exact.empty() && cs.forbidden_exact.count(scan::print_command(c))) {
    return false;
  }
  std::set<std::string> mentioned;
  std::vector<int> concept_ab;
  for (const scan::Part& p : scan::part_phrases(c)) {
    for (std::string& m : mentions_of(p)) mentioned.insert(std::move(m));
    switch (concept_of_scan_part(p)) {
      case ScanConcept::Left: concept_ab.push_back(0); break;
      case ScanConcept::Right: concept_ab.push_back(1); break;
      case ScanConcept::None: concept_ab.push_back(-1); break;
    }
  }
  return detail::names_ok(mentioned, cs) && detail::pattern_ok(cs.pattern, concept_ab);
}

inline bool rf_satisfies(const rf::Program& p, const ConstraintSet& cs) {
  std::set<std::string> mentioned;
  std::vector<int> concept_ab;
  for (const rf::Expression& e : p.expressions) {
    for (std::string& m : mentions_of(e)) mentioned.insert(std::move(m));
    switch (concept_of_rf_expression(e)) {
      case RfConcept::Substring: concept_ab.push_back(0); break;
      case RfConcept::NonSubstring: concept_ab.push_back(1); break;
      case RfConcept::Compose: concept_ab.push_back(-1); break;
    }
  }
  return detail::names_ok(mentioned, cs) && detail::pattern_ok(cs.pattern, concept_ab);
}

// ---------------------------------------------------------------------------
// SCAN sampler

class ScanSampler {
 public:
  explicit ScanSampler(const SamplerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg_.lengths.empty()) throw std::invalid_argument("no part counts to sample from");
    for (int n : cfg_.lengths) {
      if (n < 1 || n > 10) throw std::invalid_argument("part counts must lie in [1, 10]");
    }
    for (scan::Verb v : {scan::Verb::Walk, scan::Verb::Look, scan::Verb::Run, scan::Verb::Jump}) {
      templates_.push_back({v, scan::Modifier::None, scan::Direction::Left});
    }
    for (scan::Verb v : {scan::Verb::Turn, scan::Verb::Walk, scan::Verb::Look,
                         scan::Verb::Run, scan::Verb::Jump}) {
      for (scan::Modifier m :
           {scan::Modifier::Plain, scan::Modifier::Opposite, scan::Modifier::Around}) {
        for (scan::Direction d : {scan::Direction::Left, scan::Direction::Right}) {
          templates_.push_back({v, m, d});
        }
      }
    }
  }

  scan::Command sample() { return sample(cfg_.constraints); }

  scan::Command sample(const ConstraintSet& cs) {
    std::string last;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
      const auto candidate = try_sample(cs);
      if (!candidate) continue;
      if (scan_satisfies(*candidate, cs)) return *candidate;
      last = scan::print_command(*candidate);
    }
    throw GenerationError("scan constraints unsatisfiable after " +
                              std::to_string(kRejectionBudget) + " attempts",
                          last);
  }

  // The isolated length-1 "jump" command.
  static scan::Command special_bare_jump() {
    return scan::Command{{{scan::Part{scan::Verb::Jump}}}};
  }

  scan::Command sample_special() { return special_bare_jump(); }

 private:
  struct Template {
    scan::Verb verb;
    scan::Modifier modifier;
    scan::Direction direction;
  };

  std::optional<scan::Command> try_sample(const ConstraintSet& cs) {
    const int n = cfg_.lengths[rng_.index(cfg_.lengths.size())];

    // Group sizes in command order; a new group starts at every "after".
    std::vector<int> group_sizes{1};
    for (int b = 1; b < n; ++b) {
      if (rng_.index(2) == 0) {
        group_sizes.push_back(1);
      } else {
        ++group_sizes.back();
      }
    }

    // Execution rank of each command position: groups run last-to-first.
    std::vector<std::size_t> exec_rank;
    exec_rank.reserve(static_cast<std::size_t>(n));
    {
      std::vector<std::size_t> suffix(group_sizes.size() + 1, 0);
      for (std::size_t g = group_sizes.size(); g-- > 0;) {
        suffix[g] = suffix[g + 1] + static_cast<std::size_t>(group_sizes[g]);
      }
      for (std::size_t g = 0; g < group_sizes.size(); ++g) {
        for (int k = 0; k < group_sizes[g]; ++k) {
          exec_rank.push_back(suffix[g + 1] + static_cast<std::size_t>(k));
        }
      }
    }

    // Concept side per execution rank.
    std::vector<std::optional<scan::Direction>> side(static_cast<std::size_t>(n));
    switch (cs.pattern) {
      case ConceptPattern::Any:
        break;
      case ConceptPattern::AllA:
        side.assign(static_cast<std::size_t>(n), scan::Direction::Left);
        break;
      case ConceptPattern::AllB:
        side.assign(static_cast<std::size_t>(n), scan::Direction::Right);
        break;
      case ConceptPattern::Mixed: {
        if (n < 2) return std::nullopt;
        for (auto& s : side) {
          s = rng_.index(2) == 0 ? scan::Direction::Left : scan::Direction::Right;
        }
        // Guarantee both sides appear.
        const std::size_t flip = rng_.index(static_cast<std::size_t>(n));
        bool left = false;
        bool right = false;
        for (const auto& s : side) (*s == scan::Direction::Left ? left : right) = true;
        if (!left) side[flip] = scan::Direction::Left;
        if (!right) side[flip] = scan::Direction::Right;
        break;
      }
      case ConceptPattern::AThenB:
      case ConceptPattern::BThenA: {
        if (n < 2) return std::nullopt;
        const std::size_t head = (static_cast<std::size_t>(n) + 1) / 2;
        const scan::Direction first = cs.pattern == ConceptPattern::AThenB
                                          ? scan::Direction::Left
                                          : scan::Direction::Right;
        const scan::Direction rest = first == scan::Direction::Left ? scan::Direction::Right
                                                                    : scan::Direction::Left;
        for (std::size_t r = 0; r < side.size(); ++r) side[r] = r < head ? first : rest;
        break;
      }
    }

    scan::Command c;
    std::size_t position = 0;
    for (int size : group_sizes) {
      scan::AndGroup group;
      for (int k = 0; k < size; ++k, ++position) {
        const auto part = sample_part(side[exec_rank[position]],
                                      cs.pattern != ConceptPattern::Any, cs.forbidden);
        if (!part) return std::nullopt;
        group.push_back(*part);
      }
      c.groups.push_back(std::move(group));
    }
    return c;
  }

  std::optional<scan::Part> sample_part(std::optional<scan::Direction> forced_side,
                                        bool directional_only,
                                        const std::set<std::string>& forbidden) {
    std::vector<const Template*> candidates;
    for (const Template& t : templates_) {
      if (forced_side) {
        if (t.modifier == scan::Modifier::None || t.direction != *forced_side) continue;
      } else if (directional_only && t.modifier == scan::Modifier::None) {
        continue;
      }
      scan::Part probe{t.verb, t.modifier, t.direction, scan::Repetition::Once};
      bool allowed = true;
      for (const std::string& m : mentions_of(probe)) {
        if (forbidden.count(m)) {
          allowed = false;
          break;
        }
      }
      if (allowed) candidates.push_back(&t);
    }
    if (candidates.empty()) return std::nullopt;
    const Template& t = *candidates[rng_.index(candidates.size())];

    std::vector<scan::Repetition> reps;
    for (scan::Repetition r :
         {scan::Repetition::Once, scan::Repetition::Twice, scan::Repetition::Thrice}) {
      if (r == scan::Repetition::Twice && forbidden.count("twice")) continue;
      if (r == scan::Repetition::Thrice && forbidden.count("thrice")) continue;
      reps.push_back(r);
    }
    return scan::Part{t.verb, t.modifier, t.direction, reps[rng_.index(reps.size())]};
  }

  SamplerConfig cfg_;
  Rng rng_;
  std::vector<Template> templates_;
};

inline scan::Command sample_scan(const SamplerConfig& cfg) {
  return ScanSampler(cfg).sample();
}

// ---------------------------------------------------------------------------
// RobustFill sampler

class RfSampler {
 public:
  struct Sample {
    rf::Program program;
    std::vector<rf::IoExample> examples;
  };

  explicit RfSampler(const SamplerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg_.lengths.empty()) throw std::invalid_argument("no part counts to sample from");
    for (int n : cfg_.lengths) {
      if (n < 1 || n > 10) throw std::invalid_argument("part counts must lie in [1, 10]");
    }
    if (cfg_.examples_per_task < 1) {
      throw std::invalid_argument("examples_per_task must be at least 1");
    }
    if (cfg_.input_len_min < 1 || cfg_.input_len_max < cfg_.input_len_min) {
      throw std::invalid_argument("bad input length range");
    }
    for (char c : rf::kDelimiters) alphabet_.push_back(c);
    for (char c = 'A'; c <= 'Z'; ++c) alphabet_.push_back(c);
    for (char c = 'a'; c <= 'z'; ++c) alphabet_.push_back(c);
    for (char c = '0'; c <= '9'; ++c) alphabet_.push_back(c);
  }

  Sample sample() { return sample(cfg_.constraints); }

  Sample sample(const ConstraintSet& cs) {
    std::string last;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
      const auto program = try_program(cs);
      if (!program) continue;
      last = rf::program_text(*program);
      if (!rf_satisfies(*program, cs)) continue;
      auto examples = make_examples(*program);
      if (!examples) continue;
      return {*program, std::move(*examples)};
    }
    throw GenerationError("robustfill constraints unsatisfiable after " +
                              std::to_string(kRejectionBudget) + " attempts",
                          last);
  }

  // Program structure only, no example generation. Draws stay on this
  // sampler's stream.
  rf::Program sample_program(const ConstraintSet& cs) {
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
      const auto program = try_program(cs);
      if (program && rf_satisfies(*program, cs)) return *program;
    }
    throw GenerationError("robustfill constraints unsatisfiable after " +
                          std::to_string(kRejectionBudget) + " attempts");
  }

  rf::Program sample_program() { return sample_program(cfg_.constraints); }

  // A length-1 program holding a single Compose expression, with examples.
  Sample sample_special() {
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
      rf::Program program;
      program.expressions.push_back(rf::Expression{sample_compose(true)});
      auto examples = make_examples(program);
      if (!examples) continue;
      return {std::move(program), std::move(*examples)};
    }
    throw GenerationError("could not build a compose-only program with valid examples");
  }

 private:
  enum class Kind { Substring, Modification, Compose, Const };

  std::optional<rf::Program> try_program(const ConstraintSet& cs) {
    const int n = cfg_.lengths[rng_.index(cfg_.lengths.size())];

    std::vector<std::optional<RfConcept>> label(static_cast<std::size_t>(n));
    switch (cs.pattern) {
      case ConceptPattern::Any:
        break;
      case ConceptPattern::AllA:
        label.assign(static_cast<std::size_t>(n), RfConcept::Substring);
        break;
      case ConceptPattern::AllB:
        label.assign(static_cast<std::size_t>(n), RfConcept::NonSubstring);
        break;
      case ConceptPattern::Mixed: {
        if (n < 2) return std::nullopt;
        for (auto& l : label) {
          l = rng_.index(2) == 0 ? RfConcept::Substring : RfConcept::NonSubstring;
        }
        const std::size_t flip = rng_.index(static_cast<std::size_t>(n));
        bool a = false;
        bool b = false;
        for (const auto& l : label) (*l == RfConcept::Substring ? a : b) = true;
        if (!a) label[flip] = RfConcept::Substring;
        if (!b) label[flip] = RfConcept::NonSubstring;
        break;
      }
      case ConceptPattern::AThenB:
      case ConceptPattern::BThenA: {
        if (n < 2) return std::nullopt;
        const std::size_t head = (static_cast<std::size_t>(n) + 1) / 2;
        const RfConcept first = cs.pattern == ConceptPattern::AThenB
                                    ? RfConcept::Substring
                                    : RfConcept::NonSubstring;
        const RfConcept rest = first == RfConcept::Substring ? RfConcept::NonSubstring
                                                             : RfConcept::Substring;
        for (std::size_t i = 0; i < label.size(); ++i) label[i] = i < head ? first : rest;
        break;
      }
    }

    rf::Program program;
    for (int i = 0; i < n; ++i) {
      auto e = sample_expression(label[static_cast<std::size_t>(i)], cs.forbidden);
      if (!e) return std::nullopt;
      program.expressions.push_back(std::move(*e));
    }
    return program;
  }

  std::optional<rf::Expression> sample_expression(std::optional<RfConcept> forced,
                                                  const std::set<std::string>& forbidden) {
    std::vector<Kind> kinds;
    if (!forced) {
      kinds = {Kind::Substring, Kind::Modification, Kind::Compose, Kind::Const};
    } else if (*forced == RfConcept::Substring) {
      kinds = {Kind::Substring};
    } else {
      kinds = {Kind::Modification, Kind::Const};
    }
    std::erase_if(kinds, [&](Kind k) {
      return (k == Kind::Compose && forbidden.count("Compose")) ||
             (k == Kind::Const && forbidden.count("ConstStr"));
    });
    if (kinds.empty()) return std::nullopt;

    switch (kinds[rng_.index(kinds.size())]) {
      case Kind::Substring: {
        auto s = sample_substring(forbidden);
        if (!s) return std::nullopt;
        return rf::Expression{*s};
      }
      case Kind::Modification: {
        auto m = sample_modification(forbidden);
        if (!m) return std::nullopt;
        return rf::Expression{*m};
      }
      case Kind::Const:
        return rf::Expression{rf::ConstStr{sample_literal_char()}};
      case Kind::Compose:
        return rf::Expression{sample_compose(!forbidden.count("ComposeSubstring"), forbidden)};
    }
    return std::nullopt;
  }

  rf::Compose sample_compose(bool allow_substring_inner,
                             const std::set<std::string>& forbidden = {}) {
    rf::Compose o;
    // Modification sampling can only fail when names are forbidden; the
    // compose-only special generator passes no restrictions.
    const auto outer = sample_modification(forbidden);
    o.outer = outer ? *outer : rf::ModificationOp{rf::Trim{}};
    if (allow_substring_inner && rng_.index(2) == 0) {
      const auto inner = sample_substring(forbidden);
      if (inner) {
        o.inner = *inner;
        return o;
      }
    }
    const auto inner = sample_modification(forbidden);
    o.inner = inner ? *inner : rf::ModificationOp{rf::Trim{}};
    return o;
  }

  std::optional<rf::SubstringOp> sample_substring(const std::set<std::string>& forbidden) {
    static constexpr std::string_view kNames[] = {"SubStr", "GetSpan", "GetToken",
                                                  "GetUpto", "GetFrom"};
    std::vector<std::string_view> names;
    for (std::string_view n : kNames) {
      if (!forbidden.count(std::string(n))) names.push_back(n);
    }
    if (names.empty()) return std::nullopt;
    const std::string_view name = names[rng_.index(names.size())];
    if (name == "SubStr") {
      // Positions stay within the configured input size so seeded inputs can
      // actually satisfy them; the grammar allows up to +/-100.
      const int cap = std::min(rf::kMaxPosition, cfg_.input_len_max);
      return rf::SubstringOp{rf::SubStr{sample_nonzero(cap), sample_nonzero(cap)}};
    }
    if (name == "GetSpan") {
      rf::GetSpan g;
      g.r1 = sample_regex();
      g.i1 = sample_nonzero(rf::kMaxIndex);
      g.b1 = rng_.index(2) == 0 ? rf::Boundary::Start : rf::Boundary::End;
      g.r2 = sample_regex();
      g.i2 = sample_nonzero(rf::kMaxIndex);
      g.b2 = rng_.index(2) == 0 ? rf::Boundary::Start : rf::Boundary::End;
      return rf::SubstringOp{g};
    }
    if (name == "GetToken") {
      return rf::SubstringOp{rf::GetToken{sample_type(), sample_nonzero(rf::kMaxIndex)}};
    }
    if (name == "GetUpto") return rf::SubstringOp{rf::GetUpto{sample_regex()}};
    return rf::SubstringOp{rf::GetFrom{sample_regex()}};
  }

  std::optional<rf::ModificationOp> sample_modification(const std::set<std::string>& forbidden) {
    static constexpr std::string_view kNames[] = {
        "ToCase", "Replace", "Trim",         "GetFirst", "GetAll",
        "Substitute", "SubstituteAll", "Remove",   "RemoveAll"};
    std::vector<std::string_view> names;
    for (std::string_view n : kNames) {
      if (!forbidden.count(std::string(n))) names.push_back(n);
    }
    if (names.empty()) return std::nullopt;
    const std::string_view name = names[rng_.index(names.size())];
    if (name == "ToCase") {
      static constexpr rf::CaseStyle kStyles[] = {rf::CaseStyle::Proper,
                                                  rf::CaseStyle::AllCaps,
                                                  rf::CaseStyle::Lower};
      return rf::ModificationOp{rf::ToCase{kStyles[rng_.index(3)]}};
    }
    if (name == "Replace") {
      return rf::ModificationOp{
          rf::Replace{rng_.pick_char(rf::kDelimiters), rng_.pick_char(rf::kDelimiters)}};
    }
    if (name == "Trim") return rf::ModificationOp{rf::Trim{}};
    if (name == "GetFirst") {
      // Only positive counts make sense for "the first i matches".
      return rf::ModificationOp{rf::GetFirst{sample_type(), rng_.range(1, rf::kMaxIndex)}};
    }
    if (name == "GetAll") return rf::ModificationOp{rf::GetAll{sample_type()}};
    if (name == "Substitute") {
      return rf::ModificationOp{
          rf::Substitute{sample_type(), sample_nonzero(rf::kMaxIndex), sample_literal_char()}};
    }
    if (name == "SubstituteAll") {
      return rf::ModificationOp{rf::SubstituteAll{sample_type(), sample_literal_char()}};
    }
    if (name == "Remove") {
      return rf::ModificationOp{rf::Remove{sample_type(), sample_nonzero(rf::kMaxIndex)}};
    }
    return rf::ModificationOp{rf::RemoveAll{sample_type()}};
  }

  rf::TokenType sample_type() { return rf::kTokenTypes[rng_.index(8)]; }

  rf::Regex sample_regex() {
    // Uniform over the 8 token types and the delimiter literals.
    const std::size_t i = rng_.index(8 + rf::kDelimiters.size());
    if (i < 8) return rf::Regex{rf::kTokenTypes[i]};
    return rf::Regex{rf::kDelimiters[i - 8]};
  }

  int sample_nonzero(int bound) {
    const int v = rng_.range(1, bound);
    return rng_.index(2) == 0 ? v : -v;
  }

  char sample_literal_char() { return alphabet_[rng_.index(alphabet_.size())]; }

  // ---- input generation ----

  struct Requirements {
    std::map<rf::TokenType, int> type_counts;
    std::map<char, int> delim_counts;
    std::size_t min_len = 0;
  };

  static void need(Requirements& req, const rf::Regex& r, int count) {
    if (count < 1) count = 1;
    if (const rf::TokenType* t = std::get_if<rf::TokenType>(&r)) {
      int& c = req.type_counts[*t];
      c = std::max(c, count);
    } else {
      int& c = req.delim_counts[std::get<char>(r)];
      c = std::max(c, count);
    }
  }

  static void need_type(Requirements& req, rf::TokenType t, int count) {
    need(req, rf::Regex{t}, count);
  }

  static void gather(Requirements& req, const rf::SubstringOp& op) {
    if (const rf::SubStr* s = std::get_if<rf::SubStr>(&op)) {
      req.min_len = std::max({req.min_len, static_cast<std::size_t>(std::abs(s->k1)),
                              static_cast<std::size_t>(std::abs(s->k2))});
    } else if (const rf::GetSpan* g = std::get_if<rf::GetSpan>(&op)) {
      need(req, g->r1, std::abs(g->i1));
      need(req, g->r2, std::abs(g->i2));
    } else if (const rf::GetToken* g = std::get_if<rf::GetToken>(&op)) {
      need_type(req, g->t, std::abs(g->i));
    } else if (const rf::GetUpto* g = std::get_if<rf::GetUpto>(&op)) {
      need(req, g->r, 1);
    } else {
      need(req, std::get<rf::GetFrom>(op).r, 1);
    }
  }

  static void gather(Requirements& req, const rf::ModificationOp& op) {
    if (const rf::GetFirst* m = std::get_if<rf::GetFirst>(&op)) {
      need_type(req, m->t, std::abs(m->i));
    } else if (const rf::GetAll* m = std::get_if<rf::GetAll>(&op)) {
      need_type(req, m->t, 1);
    } else if (const rf::Substitute* m = std::get_if<rf::Substitute>(&op)) {
      need_type(req, m->t, std::abs(m->i));
    } else if (const rf::Remove* m = std::get_if<rf::Remove>(&op)) {
      need_type(req, m->t, std::abs(m->i));
    }
    // ToCase / Replace / Trim / SubstituteAll / RemoveAll never fail.
  }

  static Requirements gather(const rf::Program& p) {
    Requirements req;
    for (const rf::Expression& e : p.expressions) {
      if (const rf::SubstringOp* s = std::get_if<rf::SubstringOp>(&e)) {
        gather(req, *s);
      } else if (const rf::ModificationOp* m = std::get_if<rf::ModificationOp>(&e)) {
        gather(req, *m);
      } else if (const rf::Compose* o = std::get_if<rf::Compose>(&e)) {
        // The outer operation runs on the inner result, so seeding its
        // requirements into the input is only a heuristic; the evaluation
        // check below rejects inputs it does not rescue.
        gather(req, o->outer);
        if (const rf::ModificationOp* m = std::get_if<rf::ModificationOp>(&o->inner)) {
          gather(req, *m);
        } else {
          gather(req, std::get<rf::SubstringOp>(o->inner));
        }
      }
    }
    return req;
  }

  std::string gen_token(rf::TokenType t) {
    static constexpr std::string_view kUpper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    static constexpr std::string_view kLowerChars = "abcdefghijklmnopqrstuvwxyz";
    static constexpr std::string_view kDigits = "0123456789";
    std::string out;
    switch (t) {
      case rf::TokenType::Number:
        for (int i = rng_.range(1, 3); i > 0; --i) out += rng_.pick_char(kDigits);
        break;
      case rf::TokenType::Word:
        for (int i = rng_.range(1, 4); i > 0; --i) {
          out += rng_.index(2) == 0 ? rng_.pick_char(kUpper) : rng_.pick_char(kLowerChars);
        }
        break;
      case rf::TokenType::Alphanum:
        for (int i = rng_.range(2, 4); i > 0; --i) {
          const int k = rng_.range(0, 2);
          out += k == 0 ? rng_.pick_char(kUpper)
                        : (k == 1 ? rng_.pick_char(kLowerChars) : rng_.pick_char(kDigits));
        }
        break;
      case rf::TokenType::AllCaps:
        for (int i = rng_.range(1, 3); i > 0; --i) out += rng_.pick_char(kUpper);
        break;
      case rf::TokenType::PropCase:
        out += rng_.pick_char(kUpper);
        for (int i = rng_.range(1, 3); i > 0; --i) out += rng_.pick_char(kLowerChars);
        break;
      case rf::TokenType::Lower:
        for (int i = rng_.range(1, 3); i > 0; --i) out += rng_.pick_char(kLowerChars);
        break;
      case rf::TokenType::Digit:
        out += rng_.pick_char(kDigits);
        break;
      case rf::TokenType::Char:
        out += alphabet_[rng_.index(alphabet_.size())];
        break;
    }
    return out;
  }

  std::string gen_filler() {
    switch (rng_.index(5)) {
      case 0: return gen_token(rf::TokenType::Word);
      case 1: return gen_token(rf::TokenType::Number);
      case 2: return gen_token(rf::TokenType::PropCase);
      case 3: return std::string(1, rng_.pick_char(rf::kDelimiters));
      default: return gen_token(rf::TokenType::Alphanum);
    }
  }

  // One guaranteed occurrence per requirement, then random filler tokens,
  // shuffled and joined with single spaces.
  std::string seed_input(const Requirements& req) {
    std::vector<std::string> tokens;
    for (const auto& [t, count] : req.type_counts) {
      for (int k = 0; k < count; ++k) tokens.push_back(gen_token(t));
    }
    for (const auto& [d, count] : req.delim_counts) {
      for (int k = 0; k < count; ++k) tokens.emplace_back(1, d);
    }
    std::size_t target =
        static_cast<std::size_t>(rng_.range(cfg_.input_len_min, cfg_.input_len_max));
    target = std::max(target, req.min_len);
    auto joined_size = [&tokens]() {
      std::size_t n = tokens.empty() ? 0 : tokens.size() - 1;
      for (const std::string& t : tokens) n += t.size();
      return n;
    };
    while (joined_size() < target) tokens.push_back(gen_filler());
    rng_.shuffle(tokens);
    return text::join(tokens, " ");
  }

  std::optional<std::vector<rf::IoExample>> make_examples(const rf::Program& program) {
    const Requirements req = gather(program);
    std::vector<rf::IoExample> out;
    for (int e = 0; e < cfg_.examples_per_task; ++e) {
      bool done = false;
      for (int attempt = 0; attempt < kInputBudget; ++attempt) {
        std::string input = seed_input(req);
        if (input.empty()) continue;
        const auto result = rf::eval_program(program, input);
        // Empty whole-program outputs are rejected: exact-match evaluation
        // over empty targets is ambiguous.
        if (!result || result->empty()) continue;
        out.push_back({std::move(input), *result});
        done = true;
        break;
      }
      if (!done) return std::nullopt;
    }
    return out;
  }

  SamplerConfig cfg_;
  Rng rng_;
  std::string alphabet_;
};

inline RfSampler::Sample sample_rf(const SamplerConfig& cfg) {
  return RfSampler(cfg).sample();
}

}  // namespace compgen::sample
