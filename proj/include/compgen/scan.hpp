#pragma once
// Generalized SCAN command language: language-like commands built from action
// phrases joined by "and" / "after" conjunctions, translated to flat action
// sequences. "and" binds tighter than "after", both are right-associative,
// and the translation is independent of the grouping choice.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compgen/text.hpp"

namespace compgen::scan {

enum class Verb { Walk, Look, Run, Jump, Turn };
enum class Direction { Left, Right };
enum class Modifier { None, Plain, Opposite, Around };
enum class Repetition { Once, Twice, Thrice };

// One conjunction-free phrase, e.g. "jump around right thrice". `direction`
// is meaningful only when `modifier` != None and is normalized to Left
// otherwise so that structural equality works. "turn" always carries a
// direction phrase; it cannot stand alone.
struct Part {
  Verb verb = Verb::Walk;
  Modifier modifier = Modifier::None;
  Direction direction = Direction::Left;
  Repetition repetition = Repetition::Once;

  bool operator==(const Part&) const = default;
};

using AndGroup = std::vector<Part>;

// Parsed command: "and"-joined groups in command order, consecutive groups
// joined by "after". Because "and" may not join two "after" clauses, every
// command flattens to exactly one such list; this is the canonical form of
// the right-associative parse tree.
struct Command {
  std::vector<AndGroup> groups;

  bool operator==(const Command&) const = default;
};

enum class Action { Walk, Look, Run, Jump, LTurn, RTurn };

// Translated command: flat action sequence plus the half-open token span of
// every part in execution order. Clauses to the right of an "after" execute
// first, so spans need not follow command order.
struct ActionProgram {
  std::vector<Action> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> part_spans;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t token_index, const std::string& message)
      : std::runtime_error(message), token_index_(token_index) {}

  std::size_t token_index() const { return token_index_; }

 private:
  std::size_t token_index_;
};

inline std::string_view to_word(Verb v) {
  switch (v) {
    case Verb::Walk: return "walk";
    case Verb::Look: return "look";
    case Verb::Run: return "run";
    case Verb::Jump: return "jump";
    case Verb::Turn: return "turn";
  }
  return "";
}

inline std::string_view to_word(Direction d) {
  return d == Direction::Left ? "left" : "right";
}

inline std::string_view to_token(Action a) {
  switch (a) {
    case Action::Walk: return "WALK";
    case Action::Look: return "LOOK";
    case Action::Run: return "RUN";
    case Action::Jump: return "JUMP";
    case Action::LTurn: return "LTURN";
    case Action::RTurn: return "RTURN";
  }
  return "";
}

inline std::vector<std::string> action_tokens(const std::vector<Action>& actions) {
  std::vector<std::string> out;
  out.reserve(actions.size());
  for (Action a : actions) out.emplace_back(to_token(a));
  return out;
}

inline std::string to_phrase(const Part& p) {
  std::string out{to_word(p.verb)};
  switch (p.modifier) {
    case Modifier::None:
      break;
    case Modifier::Plain:
      out += ' ';
      out += to_word(p.direction);
      break;
    case Modifier::Opposite:
      out += " opposite ";
      out += to_word(p.direction);
      break;
    case Modifier::Around:
      out += " around ";
      out += to_word(p.direction);
      break;
  }
  if (p.repetition == Repetition::Twice) out += " twice";
  if (p.repetition == Repetition::Thrice) out += " thrice";
  return out;
}

inline std::string print_command(const Command& c) {
  std::vector<std::string> groups;
  groups.reserve(c.groups.size());
  for (const AndGroup& g : c.groups) {
    std::vector<std::string> parts;
    parts.reserve(g.size());
    for (const Part& p : g) parts.push_back(to_phrase(p));
    groups.push_back(text::join(parts, " and "));
  }
  return text::join(groups, " after ");
}

inline bool valid(const Part& p) {
  if (p.modifier == Modifier::None) {
    return p.verb != Verb::Turn && p.direction == Direction::Left;
  }
  return true;
}

inline bool valid(const Command& c) {
  if (c.groups.empty()) return false;
  for (const AndGroup& g : c.groups) {
    if (g.empty()) return false;
    for (const Part& p : g) {
      if (!valid(p)) return false;
    }
  }
  return true;
}

namespace detail {

inline bool verb_from(std::string_view w, Verb& out) {
  if (w == "walk") out = Verb::Walk;
  else if (w == "look") out = Verb::Look;
  else if (w == "run") out = Verb::Run;
  else if (w == "jump") out = Verb::Jump;
  else if (w == "turn") out = Verb::Turn;
  else return false;
  return true;
}

inline bool direction_from(std::string_view w, Direction& out) {
  if (w == "left") out = Direction::Left;
  else if (w == "right") out = Direction::Right;
  else return false;
  return true;
}

struct CommandParser {
  const std::vector<std::string>& tokens;
  std::size_t pos = 0;

  [[noreturn]] void fail(std::size_t at, const std::string& message) const {
    throw ParseError(at, message + " (token " + std::to_string(at) + ")");
  }

  bool at_end() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }

  Part parse_part() {
    if (at_end()) fail(pos, "expected a phrase");
    Part part;
    if (!verb_from(peek(), part.verb)) fail(pos, "unknown word '" + peek() + "'");
    ++pos;
    if (!at_end()) {
      Direction dir;
      if (direction_from(peek(), dir)) {
        part.modifier = Modifier::Plain;
        part.direction = dir;
        ++pos;
      } else if (peek() == "opposite" || peek() == "around") {
        part.modifier = peek() == "opposite" ? Modifier::Opposite : Modifier::Around;
        ++pos;
        if (at_end() || !direction_from(peek(), part.direction)) {
          fail(pos, "expected 'left' or 'right'");
        }
        ++pos;
      }
    }
    if (part.modifier == Modifier::None && part.verb == Verb::Turn) {
      fail(pos - 1, "'turn' requires a direction phrase");
    }
    if (!at_end()) {
      if (peek() == "twice") {
        part.repetition = Repetition::Twice;
        ++pos;
      } else if (peek() == "thrice") {
        part.repetition = Repetition::Thrice;
        ++pos;
      }
    }
    return part;
  }

  AndGroup parse_group() {
    AndGroup group{parse_part()};
    while (!at_end() && peek() == "and") {
      ++pos;
      group.push_back(parse_part());
    }
    return group;
  }

  Command parse_command() {
    Command c;
    c.groups.push_back(parse_group());
    while (!at_end() && peek() == "after") {
      ++pos;
      c.groups.push_back(parse_group());
    }
    if (!at_end()) fail(pos, "unexpected token '" + peek() + "'");
    return c;
  }
};

}  // namespace detail

inline Command parse_command(std::string_view textual) {
  const std::vector<std::string> tokens = text::split_ws(textual);
  if (tokens.empty()) throw ParseError(0, "empty command");
  detail::CommandParser parser{tokens};
  return parser.parse_command();
}

namespace detail {

inline Action action_of(Verb v) {
  switch (v) {
    case Verb::Walk: return Action::Walk;
    case Verb::Look: return Action::Look;
    case Verb::Run: return Action::Run;
    case Verb::Jump: return Action::Jump;
    case Verb::Turn: break;  // unreachable for valid parts
  }
  return Action::Walk;
}

}  // namespace detail

// Rewrites for a single phrase:
//   turn left/right         -> one turn
//   a left/right            -> turn, action
//   * opposite d            -> turn twice (then the action, if any)
//   turn around d           -> four turns
//   a around d              -> (turn, action) four times
// and "twice"/"thrice" repeat the whole rewrite.
inline std::vector<Action> phrase_actions(const Part& p) {
  const Action turn = p.direction == Direction::Left ? Action::LTurn : Action::RTurn;
  std::vector<Action> once;
  switch (p.modifier) {
    case Modifier::None:
      once = {detail::action_of(p.verb)};
      break;
    case Modifier::Plain:
      if (p.verb == Verb::Turn) once = {turn};
      else once = {turn, detail::action_of(p.verb)};
      break;
    case Modifier::Opposite:
      if (p.verb == Verb::Turn) once = {turn, turn};
      else once = {turn, turn, detail::action_of(p.verb)};
      break;
    case Modifier::Around:
      if (p.verb == Verb::Turn) {
        once = {turn, turn, turn, turn};
      } else {
        const Action a = detail::action_of(p.verb);
        once = {turn, a, turn, a, turn, a, turn, a};
      }
      break;
  }
  int reps = 1;
  if (p.repetition == Repetition::Twice) reps = 2;
  if (p.repetition == Repetition::Thrice) reps = 3;
  std::vector<Action> out;
  out.reserve(once.size() * static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) out.insert(out.end(), once.begin(), once.end());
  return out;
}

// Leaf parts in execution order: groups run last-to-first (each "after"
// flips the remainder ahead of its left clause), parts within a group run
// left-to-right.
inline std::vector<Part> part_phrases(const Command& c) {
  std::vector<Part> out;
  for (auto git = c.groups.rbegin(); git != c.groups.rend(); ++git) {
    for (const Part& p : *git) out.push_back(p);
  }
  return out;
}

inline std::size_t part_count(const Command& c) {
  std::size_t n = 0;
  for (const AndGroup& g : c.groups) n += g.size();
  return n;
}

inline ActionProgram translate(const Command& c) {
  ActionProgram prog;
  for (const Part& p : part_phrases(c)) {
    const std::vector<Action> actions = phrase_actions(p);
    const std::size_t begin = prog.tokens.size();
    prog.tokens.insert(prog.tokens.end(), actions.begin(), actions.end());
    prog.part_spans.emplace_back(begin, prog.tokens.size());
  }
  return prog;
}

}  // namespace compgen::scan
