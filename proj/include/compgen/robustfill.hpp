#pragma once
// String-transformation DSL: a program is a concatenation of expressions
// that extract substrings, modify the input, compose two operations, or emit
// a constant character. Evaluation is deterministic; operations that
// reference a missing match or an out-of-range position report failure as
// std::nullopt instead of throwing.
//
// Conventions, fixed once here:
//   * Token-type matches are maximal, non-overlapping, scanned left to
//     right. DIGIT and CHAR match single characters.
//   * Positions and match indices are 1-based; negative values count from
//     the end (-1 is the last one). Zero is never a legal literal.
//   * A modification used as a whole expression acts on the input string.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "compgen/text.hpp"

namespace compgen::rf {

inline constexpr std::string_view kDelimiters = "&,.?!@()[]%{}/:;$#\"'";
inline constexpr int kMaxPosition = 100;  // SubStr positions: [-100, 100] minus 0
inline constexpr int kMaxIndex = 5;       // match indices: [-5, 5] minus 0

inline bool is_delimiter(char c) {
  return kDelimiters.find(c) != std::string_view::npos;
}

inline bool is_upper_ch(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower_ch(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_letter_ch(char c) { return is_upper_ch(c) || is_lower_ch(c); }
inline bool is_digit_ch(char c) { return c >= '0' && c <= '9'; }
inline bool is_alnum_ch(char c) { return is_letter_ch(c) || is_digit_ch(c); }

// Characters legal as ConstStr/Substitute literals: letters, digits, and the
// delimiter set. I/O strings may additionally contain spaces.
inline bool is_literal_char(char c) { return is_alnum_ch(c) || is_delimiter(c); }
inline bool is_string_char(char c) { return c == ' ' || is_literal_char(c); }

enum class TokenType { Number, Word, Alphanum, AllCaps, PropCase, Lower, Digit, Char };

inline constexpr TokenType kTokenTypes[] = {
    TokenType::Number, TokenType::Word,  TokenType::Alphanum, TokenType::AllCaps,
    TokenType::PropCase, TokenType::Lower, TokenType::Digit,  TokenType::Char,
};

enum class CaseStyle { Proper, AllCaps, Lower };
enum class Boundary { Start, End };

// A "regex" argument is either a token type or a delimiter literal.
using Regex = std::variant<TokenType, char>;

struct SubStr {
  int k1 = 1;
  int k2 = 1;
  bool operator==(const SubStr&) const = default;
};

struct GetSpan {
  Regex r1;
  int i1 = 1;
  Boundary b1 = Boundary::Start;
  Regex r2;
  int i2 = 1;
  Boundary b2 = Boundary::End;
  bool operator==(const GetSpan&) const = default;
};

struct GetToken {
  TokenType t = TokenType::Word;
  int i = 1;
  bool operator==(const GetToken&) const = default;
};

struct GetUpto {
  Regex r;
  bool operator==(const GetUpto&) const = default;
};

struct GetFrom {
  Regex r;
  bool operator==(const GetFrom&) const = default;
};

using SubstringOp = std::variant<SubStr, GetSpan, GetToken, GetUpto, GetFrom>;

struct ToCase {
  CaseStyle style = CaseStyle::Lower;
  bool operator==(const ToCase&) const = default;
};

struct Replace {
  char from = ',';
  char to = '.';
  bool operator==(const Replace&) const = default;
};

struct Trim {
  bool operator==(const Trim&) const = default;
};

struct GetFirst {
  TokenType t = TokenType::Word;
  int i = 1;
  bool operator==(const GetFirst&) const = default;
};

struct GetAll {
  TokenType t = TokenType::Word;
  bool operator==(const GetAll&) const = default;
};

struct Substitute {
  TokenType t = TokenType::Word;
  int i = 1;
  char c = '@';
  bool operator==(const Substitute&) const = default;
};

struct SubstituteAll {
  TokenType t = TokenType::Word;
  char c = '@';
  bool operator==(const SubstituteAll&) const = default;
};

struct Remove {
  TokenType t = TokenType::Word;
  int i = 1;
  bool operator==(const Remove&) const = default;
};

struct RemoveAll {
  TokenType t = TokenType::Word;
  bool operator==(const RemoveAll&) const = default;
};

using ModificationOp = std::variant<ToCase, Replace, Trim, GetFirst, GetAll,
                                    Substitute, SubstituteAll, Remove, RemoveAll>;

// m1(m2) or m(s): apply `inner` to the input, then `outer` to its result.
// Nesting stops here; Compose never appears inside Compose.
struct Compose {
  ModificationOp outer;
  std::variant<ModificationOp, SubstringOp> inner;
  bool operator==(const Compose&) const = default;
};

struct ConstStr {
  char c = '@';
  bool operator==(const ConstStr&) const = default;
};

using Expression = std::variant<SubstringOp, ModificationOp, Compose, ConstStr>;

struct Program {
  std::vector<Expression> expressions;
  bool operator==(const Program&) const = default;
};

struct IoExample {
  std::string input;
  std::string output;
  bool operator==(const IoExample&) const = default;
};

// ---------------------------------------------------------------------------
// Matching

using Span = std::pair<std::size_t, std::size_t>;  // half-open [begin, end)

inline std::vector<Span> find_matches(TokenType t, std::string_view s) {
  std::vector<Span> out;
  const std::size_t n = s.size();
  auto runs = [&](auto pred) {
    std::size_t i = 0;
    while (i < n) {
      if (pred(s[i])) {
        std::size_t j = i + 1;
        while (j < n && pred(s[j])) ++j;
        out.emplace_back(i, j);
        i = j;
      } else {
        ++i;
      }
    }
  };
  switch (t) {
    case TokenType::Number: runs(is_digit_ch); break;
    case TokenType::Word: runs(is_letter_ch); break;
    case TokenType::Alphanum: runs(is_alnum_ch); break;
    case TokenType::AllCaps: runs(is_upper_ch); break;
    case TokenType::Lower: runs(is_lower_ch); break;
    case TokenType::PropCase: {
      // One uppercase letter followed by a maximal lowercase run.
      std::size_t i = 0;
      while (i < n) {
        if (is_upper_ch(s[i]) && i + 1 < n && is_lower_ch(s[i + 1])) {
          std::size_t j = i + 2;
          while (j < n && is_lower_ch(s[j])) ++j;
          out.emplace_back(i, j);
          i = j;
        } else {
          ++i;
        }
      }
      break;
    }
    case TokenType::Digit:
      for (std::size_t i = 0; i < n; ++i) {
        if (is_digit_ch(s[i])) out.emplace_back(i, i + 1);
      }
      break;
    case TokenType::Char:
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] != ' ') out.emplace_back(i, i + 1);
      }
      break;
  }
  return out;
}

inline std::vector<Span> find_matches(const Regex& r, std::string_view s) {
  if (const TokenType* t = std::get_if<TokenType>(&r)) return find_matches(*t, s);
  const char d = std::get<char>(r);
  std::vector<Span> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == d) out.emplace_back(i, i + 1);
  }
  return out;
}

// 1-based index with negatives counted from the end; nullopt when the
// referenced match does not exist.
inline std::optional<std::size_t> resolve_index(int i, std::size_t count) {
  if (i == 0) return std::nullopt;
  if (i > 0) {
    if (static_cast<std::size_t>(i) > count) return std::nullopt;
    return static_cast<std::size_t>(i) - 1;
  }
  const std::size_t back = static_cast<std::size_t>(-static_cast<long long>(i));
  if (back > count) return std::nullopt;
  return count - back;
}

// ---------------------------------------------------------------------------
// Evaluation

inline std::optional<std::string> eval_substring(const SubstringOp& op,
                                                 std::string_view input) {
  const std::size_t len = input.size();
  if (const SubStr* s = std::get_if<SubStr>(&op)) {
    auto resolve_pos = [len](int k) -> std::optional<std::size_t> {
      // 1-based inclusive position; negatives from the end (-1 = last).
      long long p = k > 0 ? k : static_cast<long long>(len) + k + 1;
      if (p < 1 || p > static_cast<long long>(len)) return std::nullopt;
      return static_cast<std::size_t>(p);
    };
    const auto p1 = resolve_pos(s->k1);
    const auto p2 = resolve_pos(s->k2);
    if (!p1 || !p2) return std::nullopt;
    if (*p1 > *p2) return std::string{};
    return std::string(input.substr(*p1 - 1, *p2 - *p1 + 1));
  }
  if (const GetSpan* g = std::get_if<GetSpan>(&op)) {
    const auto m1 = find_matches(g->r1, input);
    const auto m2 = find_matches(g->r2, input);
    const auto idx1 = resolve_index(g->i1, m1.size());
    const auto idx2 = resolve_index(g->i2, m2.size());
    if (!idx1 || !idx2) return std::nullopt;
    const std::size_t pos1 = g->b1 == Boundary::Start ? m1[*idx1].first : m1[*idx1].second;
    const std::size_t pos2 = g->b2 == Boundary::Start ? m2[*idx2].first : m2[*idx2].second;
    if (pos1 >= pos2) return std::string{};
    return std::string(input.substr(pos1, pos2 - pos1));
  }
  if (const GetToken* g = std::get_if<GetToken>(&op)) {
    const auto m = find_matches(g->t, input);
    const auto idx = resolve_index(g->i, m.size());
    if (!idx) return std::nullopt;
    return std::string(input.substr(m[*idx].first, m[*idx].second - m[*idx].first));
  }
  if (const GetUpto* g = std::get_if<GetUpto>(&op)) {
    const auto m = find_matches(g->r, input);
    if (m.empty()) return std::nullopt;
    return std::string(input.substr(0, m.front().second));
  }
  const GetFrom& g = std::get<GetFrom>(op);
  const auto m = find_matches(g.r, input);
  if (m.empty()) return std::nullopt;
  return std::string(input.substr(m.front().second));
}

inline std::string apply_case(std::string s, CaseStyle style) {
  switch (style) {
    case CaseStyle::Proper:
      // Title-case every letter run, leave everything else untouched.
      for (const Span& w : find_matches(TokenType::Word, s)) {
        s[w.first] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[w.first])));
        for (std::size_t i = w.first + 1; i < w.second; ++i) {
          s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
        }
      }
      break;
    case CaseStyle::AllCaps:
      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    case CaseStyle::Lower:
      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      break;
  }
  return s;
}

namespace detail {

// Rebuilds `input` with each matched span replaced by `replacement`.
inline std::string splice(std::string_view input, const std::vector<Span>& spans,
                          std::string_view replacement) {
  std::string out;
  std::size_t cursor = 0;
  for (const Span& sp : spans) {
    out += input.substr(cursor, sp.first - cursor);
    out += replacement;
    cursor = sp.second;
  }
  out += input.substr(cursor);
  return out;
}

}  // namespace detail

inline std::optional<std::string> eval_modification(const ModificationOp& op,
                                                    std::string_view input) {
  if (const ToCase* m = std::get_if<ToCase>(&op)) {
    return apply_case(std::string(input), m->style);
  }
  if (const Replace* m = std::get_if<Replace>(&op)) {
    std::string out(input);
    for (char& c : out) {
      if (c == m->from) c = m->to;
    }
    return out;
  }
  if (std::get_if<Trim>(&op)) {
    std::size_t b = 0;
    std::size_t e = input.size();
    while (b < e && input[b] == ' ') ++b;
    while (e > b && input[e - 1] == ' ') --e;
    return std::string(input.substr(b, e - b));
  }
  if (const GetFirst* m = std::get_if<GetFirst>(&op)) {
    if (m->i <= 0) return std::nullopt;
    const auto matches = find_matches(m->t, input);
    if (matches.size() < static_cast<std::size_t>(m->i)) return std::nullopt;
    std::string out;
    for (int k = 0; k < m->i; ++k) {
      out += input.substr(matches[k].first, matches[k].second - matches[k].first);
    }
    return out;
  }
  if (const GetAll* m = std::get_if<GetAll>(&op)) {
    const auto matches = find_matches(m->t, input);
    if (matches.empty()) return std::nullopt;
    std::string out;
    for (std::size_t k = 0; k < matches.size(); ++k) {
      if (k != 0) out += ' ';
      out += input.substr(matches[k].first, matches[k].second - matches[k].first);
    }
    return out;
  }
  if (const Substitute* m = std::get_if<Substitute>(&op)) {
    const auto matches = find_matches(m->t, input);
    const auto idx = resolve_index(m->i, matches.size());
    if (!idx) return std::nullopt;
    return detail::splice(input, {matches[*idx]}, std::string_view(&m->c, 1));
  }
  if (const SubstituteAll* m = std::get_if<SubstituteAll>(&op)) {
    const auto matches = find_matches(m->t, input);
    if (matches.empty()) return std::string(input);
    return detail::splice(input, matches, std::string_view(&m->c, 1));
  }
  if (const Remove* m = std::get_if<Remove>(&op)) {
    const auto matches = find_matches(m->t, input);
    const auto idx = resolve_index(m->i, matches.size());
    if (!idx) return std::nullopt;
    return detail::splice(input, {matches[*idx]}, "");
  }
  const RemoveAll& m = std::get<RemoveAll>(op);
  const auto matches = find_matches(m.t, input);
  if (matches.empty()) return std::string(input);
  return detail::splice(input, matches, "");
}

inline std::optional<std::string> eval_expression(const Expression& e,
                                                  std::string_view input) {
  if (const SubstringOp* s = std::get_if<SubstringOp>(&e)) {
    return eval_substring(*s, input);
  }
  if (const ModificationOp* m = std::get_if<ModificationOp>(&e)) {
    return eval_modification(*m, input);
  }
  if (const ConstStr* c = std::get_if<ConstStr>(&e)) {
    return std::string(1, c->c);
  }
  const Compose& o = std::get<Compose>(e);
  std::optional<std::string> inner;
  if (const ModificationOp* m = std::get_if<ModificationOp>(&o.inner)) {
    inner = eval_modification(*m, input);
  } else {
    inner = eval_substring(std::get<SubstringOp>(o.inner), input);
  }
  if (!inner) return std::nullopt;
  return eval_modification(o.outer, *inner);
}

inline std::optional<std::string> eval_program(const Program& p, std::string_view input) {
  std::string out;
  for (const Expression& e : p.expressions) {
    const auto r = eval_expression(e, input);
    if (!r) return std::nullopt;
    out += *r;
  }
  return out;
}

// Index of the first failing expression, -1 when the whole program succeeds.
inline int first_failing_expression(const Program& p, std::string_view input) {
  for (std::size_t i = 0; i < p.expressions.size(); ++i) {
    if (!eval_expression(p.expressions[i], input)) return static_cast<int>(i);
  }
  return -1;
}

inline bool satisfies(const Program& p, const std::vector<IoExample>& examples) {
  for (const IoExample& ex : examples) {
    const auto out = eval_program(p, ex.input);
    if (!out || *out != ex.output) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Token names

inline std::string_view to_name(TokenType t) {
  switch (t) {
    case TokenType::Number: return "NUMBER";
    case TokenType::Word: return "WORD";
    case TokenType::Alphanum: return "ALPHANUM";
    case TokenType::AllCaps: return "ALL_CAPS";
    case TokenType::PropCase: return "PROP_CASE";
    case TokenType::Lower: return "LOWER";
    case TokenType::Digit: return "DIGIT";
    case TokenType::Char: return "CHAR";
  }
  return "";
}

inline std::optional<TokenType> token_type_from_name(std::string_view s) {
  for (TokenType t : kTokenTypes) {
    if (to_name(t) == s) return t;
  }
  return std::nullopt;
}

inline std::string_view to_name(CaseStyle c) {
  switch (c) {
    case CaseStyle::Proper: return "PROPER";
    case CaseStyle::AllCaps: return "ALL_CAPS";
    case CaseStyle::Lower: return "LOWER";
  }
  return "";
}

inline std::optional<CaseStyle> case_style_from_name(std::string_view s) {
  if (s == "PROPER") return CaseStyle::Proper;
  if (s == "ALL_CAPS") return CaseStyle::AllCaps;
  if (s == "LOWER") return CaseStyle::Lower;
  return std::nullopt;
}

inline std::string_view to_name(Boundary b) {
  return b == Boundary::Start ? "START" : "END";
}

inline std::optional<Boundary> boundary_from_name(std::string_view s) {
  if (s == "START") return Boundary::Start;
  if (s == "END") return Boundary::End;
  return std::nullopt;
}

inline std::string_view op_name(const SubstringOp& op) {
  switch (op.index()) {
    case 0: return "SubStr";
    case 1: return "GetSpan";
    case 2: return "GetToken";
    case 3: return "GetUpto";
    case 4: return "GetFrom";
  }
  return "";
}

inline std::string_view op_name(const ModificationOp& op) {
  switch (op.index()) {
    case 0: return "ToCase";
    case 1: return "Replace";
    case 2: return "Trim";
    case 3: return "GetFirst";
    case 4: return "GetAll";
    case 5: return "Substitute";
    case 6: return "SubstituteAll";
    case 7: return "Remove";
    case 8: return "RemoveAll";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Prefix token form. Every operator has a fixed arity, so the prefix
// sequence needs no brackets and detokenizes unambiguously.

namespace detail {

inline void push_regex(const Regex& r, std::vector<std::string>& out) {
  if (const TokenType* t = std::get_if<TokenType>(&r)) {
    out.emplace_back(to_name(*t));
  } else {
    out.emplace_back(1, std::get<char>(r));
  }
}

}  // namespace detail

inline void append_tokens(const SubstringOp& op, std::vector<std::string>& out) {
  out.emplace_back(op_name(op));
  if (const SubStr* s = std::get_if<SubStr>(&op)) {
    out.push_back(std::to_string(s->k1));
    out.push_back(std::to_string(s->k2));
  } else if (const GetSpan* g = std::get_if<GetSpan>(&op)) {
    detail::push_regex(g->r1, out);
    out.push_back(std::to_string(g->i1));
    out.emplace_back(to_name(g->b1));
    detail::push_regex(g->r2, out);
    out.push_back(std::to_string(g->i2));
    out.emplace_back(to_name(g->b2));
  } else if (const GetToken* g = std::get_if<GetToken>(&op)) {
    out.emplace_back(to_name(g->t));
    out.push_back(std::to_string(g->i));
  } else if (const GetUpto* g = std::get_if<GetUpto>(&op)) {
    detail::push_regex(g->r, out);
  } else {
    detail::push_regex(std::get<GetFrom>(op).r, out);
  }
}

inline void append_tokens(const ModificationOp& op, std::vector<std::string>& out) {
  out.emplace_back(op_name(op));
  if (const ToCase* m = std::get_if<ToCase>(&op)) {
    out.emplace_back(to_name(m->style));
  } else if (const Replace* m = std::get_if<Replace>(&op)) {
    out.emplace_back(1, m->from);
    out.emplace_back(1, m->to);
  } else if (std::get_if<Trim>(&op)) {
    // no arguments
  } else if (const GetFirst* m = std::get_if<GetFirst>(&op)) {
    out.emplace_back(to_name(m->t));
    out.push_back(std::to_string(m->i));
  } else if (const GetAll* m = std::get_if<GetAll>(&op)) {
    out.emplace_back(to_name(m->t));
  } else if (const Substitute* m = std::get_if<Substitute>(&op)) {
    out.emplace_back(to_name(m->t));
    out.push_back(std::to_string(m->i));
    out.emplace_back(1, m->c);
  } else if (const SubstituteAll* m = std::get_if<SubstituteAll>(&op)) {
    out.emplace_back(to_name(m->t));
    out.emplace_back(1, m->c);
  } else if (const Remove* m = std::get_if<Remove>(&op)) {
    out.emplace_back(to_name(m->t));
    out.push_back(std::to_string(m->i));
  } else {
    out.emplace_back(to_name(std::get<RemoveAll>(op).t));
  }
}

inline void append_tokens(const Expression& e, std::vector<std::string>& out) {
  if (const SubstringOp* s = std::get_if<SubstringOp>(&e)) {
    append_tokens(*s, out);
  } else if (const ModificationOp* m = std::get_if<ModificationOp>(&e)) {
    append_tokens(*m, out);
  } else if (const ConstStr* c = std::get_if<ConstStr>(&e)) {
    out.emplace_back("ConstStr");
    out.emplace_back(1, c->c);
  } else {
    const Compose& o = std::get<Compose>(e);
    out.emplace_back("Compose");
    append_tokens(o.outer, out);
    if (const ModificationOp* m = std::get_if<ModificationOp>(&o.inner)) {
      append_tokens(*m, out);
    } else {
      append_tokens(std::get<SubstringOp>(o.inner), out);
    }
  }
}

inline std::vector<std::string> tokenize_expression(const Expression& e) {
  std::vector<std::string> out;
  append_tokens(e, out);
  return out;
}

inline std::vector<std::string> tokenize_program(const Program& p) {
  std::vector<std::string> out;
  for (const Expression& e : p.expressions) append_tokens(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t token_index, const std::string& message)
      : std::runtime_error(message), token_index_(token_index) {}

  std::size_t token_index() const { return token_index_; }

 private:
  std::size_t token_index_;
};

namespace detail {

inline bool is_substring_name(std::string_view s) {
  return s == "SubStr" || s == "GetSpan" || s == "GetToken" || s == "GetUpto" ||
         s == "GetFrom";
}

inline bool is_modification_name(std::string_view s) {
  return s == "ToCase" || s == "Replace" || s == "Trim" || s == "GetFirst" ||
         s == "GetAll" || s == "Substitute" || s == "SubstituteAll" ||
         s == "Remove" || s == "RemoveAll";
}

struct ProgramParser {
  const std::vector<std::string>& tokens;
  std::size_t pos = 0;

  [[noreturn]] void fail(std::size_t at, const std::string& message) const {
    throw ParseError(at, message + " (token " + std::to_string(at) + ")");
  }

  bool at_end() const { return pos >= tokens.size(); }

  const std::string& next(const char* what) {
    if (at_end()) fail(pos, std::string("expected ") + what + " but the program ended");
    return tokens[pos++];
  }

  int parse_int(int bound, const char* what) {
    const std::size_t at = pos;
    const std::string& tok = next(what);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail(at, std::string("expected ") + what + ", got '" + tok + "'");
    }
    if (value == 0 || value < -bound || value > bound) {
      fail(at, std::string(what) + " '" + tok + "' outside [-" + std::to_string(bound) +
                   ", " + std::to_string(bound) + "] excluding 0");
    }
    return value;
  }

  char parse_char(const char* what) {
    const std::size_t at = pos;
    const std::string& tok = next(what);
    if (tok.size() != 1 || !is_literal_char(tok[0])) {
      fail(at, std::string("expected ") + what + ", got '" + tok + "'");
    }
    return tok[0];
  }

  char parse_delimiter() {
    const std::size_t at = pos;
    const std::string& tok = next("a delimiter");
    if (tok.size() != 1 || !is_delimiter(tok[0])) {
      fail(at, "expected a delimiter, got '" + tok + "'");
    }
    return tok[0];
  }

  TokenType parse_type() {
    const std::size_t at = pos;
    const std::string& tok = next("a token type");
    const auto t = token_type_from_name(tok);
    if (!t) fail(at, "expected a token type, got '" + tok + "'");
    return *t;
  }

  CaseStyle parse_case() {
    const std::size_t at = pos;
    const std::string& tok = next("a case style");
    const auto c = case_style_from_name(tok);
    if (!c) fail(at, "expected a case style, got '" + tok + "'");
    return *c;
  }

  Boundary parse_boundary() {
    const std::size_t at = pos;
    const std::string& tok = next("a boundary");
    const auto b = boundary_from_name(tok);
    if (!b) fail(at, "expected START or END, got '" + tok + "'");
    return *b;
  }

  Regex parse_regex() {
    const std::size_t at = pos;
    const std::string& tok = next("a token type or delimiter");
    if (const auto t = token_type_from_name(tok)) return Regex{*t};
    if (tok.size() == 1 && is_delimiter(tok[0])) return Regex{tok[0]};
    fail(at, "expected a token type or delimiter, got '" + tok + "'");
  }

  SubstringOp parse_substring(const std::string& name) {
    if (name == "SubStr") {
      const int k1 = parse_int(kMaxPosition, "a position");
      const int k2 = parse_int(kMaxPosition, "a position");
      return SubStr{k1, k2};
    }
    if (name == "GetSpan") {
      GetSpan g;
      g.r1 = parse_regex();
      g.i1 = parse_int(kMaxIndex, "an index");
      g.b1 = parse_boundary();
      g.r2 = parse_regex();
      g.i2 = parse_int(kMaxIndex, "an index");
      g.b2 = parse_boundary();
      return g;
    }
    if (name == "GetToken") {
      const TokenType t = parse_type();
      const int i = parse_int(kMaxIndex, "an index");
      return GetToken{t, i};
    }
    if (name == "GetUpto") return GetUpto{parse_regex()};
    return GetFrom{parse_regex()};
  }

  ModificationOp parse_modification(const std::string& name) {
    if (name == "ToCase") return ToCase{parse_case()};
    if (name == "Replace") {
      const char from = parse_delimiter();
      const char to = parse_delimiter();
      return Replace{from, to};
    }
    if (name == "Trim") return Trim{};
    if (name == "GetFirst") {
      const TokenType t = parse_type();
      const int i = parse_int(kMaxIndex, "an index");
      return GetFirst{t, i};
    }
    if (name == "GetAll") return GetAll{parse_type()};
    if (name == "Substitute") {
      const TokenType t = parse_type();
      const int i = parse_int(kMaxIndex, "an index");
      const char c = parse_char("a character literal");
      return Substitute{t, i, c};
    }
    if (name == "SubstituteAll") {
      const TokenType t = parse_type();
      const char c = parse_char("a character literal");
      return SubstituteAll{t, c};
    }
    if (name == "Remove") {
      const TokenType t = parse_type();
      const int i = parse_int(kMaxIndex, "an index");
      return Remove{t, i};
    }
    return RemoveAll{parse_type()};
  }

  Expression parse_expression() {
    const std::size_t at = pos;
    const std::string& name = next("an operator");
    if (name == "ConstStr") return ConstStr{parse_char("a character literal")};
    if (name == "Compose") {
      const std::size_t outer_at = pos;
      const std::string& outer_name = next("a modification operator");
      if (!is_modification_name(outer_name)) {
        fail(outer_at, "Compose outer operation must be a modification, got '" +
                           outer_name + "'");
      }
      ModificationOp outer = parse_modification(outer_name);
      const std::size_t inner_at = pos;
      const std::string& inner_name = next("an operator");
      if (is_modification_name(inner_name)) {
        return Compose{std::move(outer), parse_modification(inner_name)};
      }
      if (is_substring_name(inner_name)) {
        return Compose{std::move(outer), parse_substring(inner_name)};
      }
      fail(inner_at, "Compose inner operation must be a modification or substring, got '" +
                         inner_name + "'");
    }
    if (is_substring_name(name)) return parse_substring(name);
    if (is_modification_name(name)) return parse_modification(name);
    fail(at, "unknown operator '" + name + "'");
  }
};

}  // namespace detail

inline Program parse_program(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw ParseError(0, "empty program");
  detail::ProgramParser parser{tokens};
  Program prog;
  while (!parser.at_end()) prog.expressions.push_back(parser.parse_expression());
  return prog;
}

inline Program parse_program_text(std::string_view textual) {
  return parse_program(text::split_ws(textual));
}

inline std::string program_text(const Program& p) {
  return text::join(tokenize_program(p), " ");
}

}  // namespace compgen::rf
