#pragma once
// Separator bookkeeping for decomposed target sequences, the decoder
// self-attention masks that confine each query to its program part, and
// bucketed relative positions for attention biases.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace compgen::decomp {

// The separator doubles as the begin-of-sequence marker, so position 0 is
// always a separator.
inline constexpr std::string_view kSepToken = "SEP";

// Target sequence wrapped with separators: [SEP part1 SEP part2 ... SEP].
// Each part is non-empty and the final token is a separator.
struct SepSequence {
  std::vector<std::string> tokens;
  std::vector<std::size_t> sep_positions;  // sorted ascending, starts at 0
};

inline SepSequence insert_separators(
    const std::vector<std::string>& program_tokens,
    const std::vector<std::pair<std::size_t, std::size_t>>& part_spans) {
  std::size_t cursor = 0;
  for (const auto& span : part_spans) {
    if (span.first != cursor || span.second <= span.first) {
      throw std::invalid_argument("part spans must tile the token sequence");
    }
    cursor = span.second;
  }
  if (cursor != program_tokens.size()) {
    throw std::invalid_argument("part spans do not cover the token sequence");
  }

  SepSequence out;
  out.tokens.reserve(program_tokens.size() + part_spans.size() + 1);
  out.tokens.emplace_back(kSepToken);
  out.sep_positions.push_back(0);
  for (const auto& span : part_spans) {
    for (std::size_t i = span.first; i < span.second; ++i) {
      out.tokens.push_back(program_tokens[i]);
    }
    out.sep_positions.push_back(out.tokens.size());
    out.tokens.emplace_back(kSepToken);
  }
  return out;
}

// Removes separator tokens and nothing else; safe on malformed sequences.
inline std::vector<std::string> strip_separators(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (t != kSepToken) out.push_back(t);
  }
  return out;
}

inline std::vector<std::size_t> separator_positions(const std::vector<std::string>& tokens) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == kSepToken) out.push_back(i);
  }
  return out;
}

inline bool is_valid_sep_sequence(const SepSequence& seq) {
  if (seq.tokens.empty()) return false;
  if (seq.sep_positions != separator_positions(seq.tokens)) return false;
  if (seq.sep_positions.empty() || seq.sep_positions.front() != 0) return false;
  if (seq.sep_positions.back() != seq.tokens.size() - 1) return false;
  for (std::size_t i = 1; i < seq.sep_positions.size(); ++i) {
    if (seq.sep_positions[i] < seq.sep_positions[i - 1] + 2) return false;  // empty part
  }
  return true;
}

enum class MaskVariant { SepFull, SepToSepAndLast, SepToLast };

inline constexpr MaskVariant kMaskVariants[] = {
    MaskVariant::SepFull, MaskVariant::SepToSepAndLast, MaskVariant::SepToLast};

inline std::string_view to_name(MaskVariant v) {
  switch (v) {
    case MaskVariant::SepFull: return "sep-full";
    case MaskVariant::SepToSepAndLast: return "sep-to-sep-and-last";
    case MaskVariant::SepToLast: return "sep-to-last";
  }
  return "";
}

inline std::optional<MaskVariant> mask_variant_from_name(std::string_view s) {
  for (MaskVariant v : kMaskVariants) {
    if (to_name(v) == s) return v;
  }
  return std::nullopt;
}

struct MaskMatrix {
  MaskVariant variant = MaskVariant::SepFull;
  std::size_t size = 0;
  std::vector<std::vector<bool>> allow;  // allow[query][key]

  bool at(std::size_t q, std::size_t k) const { return allow[q][k]; }
};

// Self-attention rules, per query row q:
//   * q is not a separator: the current part only, i.e. every position from
//     the most recent separator at-or-before q through q. Identical across
//     variants.
//   * q is a separator (the next token starts a new part):
//       sep-full            -- the whole prefix [0, q];
//       sep-to-sep-and-last -- every earlier separator, the last token of
//                              every finished part, and q itself;
//       sep-to-last         -- the last token of every finished part and q.
// Rows are always causal and never empty.
inline MaskMatrix build_mask(std::size_t length,
                             const std::vector<std::size_t>& sep_positions,
                             MaskVariant variant) {
  MaskMatrix m;
  m.variant = variant;
  m.size = length;
  m.allow.assign(length, std::vector<bool>(length, false));

  std::vector<char> is_sep(length, 0);
  for (std::size_t p : sep_positions) {
    if (p < length) is_sep[p] = 1;
  }

  for (std::size_t q = 0; q < length; ++q) {
    if (!is_sep[q]) {
      std::size_t start = q;
      while (start > 0 && !is_sep[start]) --start;  // opening separator, or 0
      for (std::size_t k = start; k <= q; ++k) m.allow[q][k] = true;
      continue;
    }
    if (variant == MaskVariant::SepFull) {
      for (std::size_t k = 0; k <= q; ++k) m.allow[q][k] = true;
      continue;
    }
    for (std::size_t s = 0; s <= q; ++s) {
      if (!is_sep[s]) continue;
      if (variant == MaskVariant::SepToSepAndLast && s < q) m.allow[q][s] = true;
      // The token right before a separator closes a part.
      if (s > 0 && !is_sep[s - 1]) m.allow[q][s - 1] = true;
    }
    m.allow[q][q] = true;
  }
  return m;
}

inline MaskMatrix build_mask(const SepSequence& seq, MaskVariant variant) {
  return build_mask(seq.tokens.size(), seq.sep_positions, variant);
}

inline std::string to_dense_text(const MaskMatrix& m) {
  std::string out;
  for (std::size_t q = 0; q < m.size; ++q) {
    for (std::size_t k = 0; k < m.size; ++k) out += m.allow[q][k] ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::string to_sparse_text(const MaskMatrix& m) {
  std::string out;
  for (std::size_t q = 0; q < m.size; ++q) {
    out += std::to_string(q);
    out += ':';
    for (std::size_t k = 0; k < m.size; ++k) {
      if (m.allow[q][k]) {
        out += ' ';
        out += std::to_string(k);
      }
    }
    out += '\n';
  }
  return out;
}

// Bucketed relative positions for attention biases. Half the ids cover
// small distances exactly, the other half widen logarithmically out to
// max_distance, beyond which the id saturates.
//
// Bidirectional mode splits the ids by sign; positive distances are shifted
// down by one so that every id stays reachable (+1 lands in the first
// positive-side bucket). Unidirectional (decoder) mode spends all ids on
// non-positive key-minus-query distances and folds future positions into
// bucket 0.
struct RelposBuckets {
  int num_buckets = 32;
  int max_distance = 128;
  bool bidirectional = true;

  int bucket(std::int64_t distance) const {
    int side_buckets = num_buckets;
    int id = 0;
    std::int64_t rel = 0;
    if (bidirectional) {
      side_buckets /= 2;
      if (distance > 0) {
        id = side_buckets;
        rel = distance - 1;
      } else {
        rel = -distance;
      }
    } else {
      rel = distance < 0 ? -distance : 0;
    }
    const std::int64_t max_exact = side_buckets / 2;
    if (rel < max_exact) return id + static_cast<int>(rel);
    const double log_ratio =
        std::log(static_cast<double>(rel) / static_cast<double>(max_exact)) /
        std::log(static_cast<double>(max_distance) / static_cast<double>(max_exact));
    const int large =
        static_cast<int>(static_cast<double>(max_exact) +
                         log_ratio * static_cast<double>(side_buckets - max_exact));
    return id + std::min(large, side_buckets - 1);
  }
};

inline int relpos_bucket(std::int64_t distance, bool bidirectional) {
  return RelposBuckets{32, 128, bidirectional}.bucket(distance);
}

}  // namespace compgen::decomp
