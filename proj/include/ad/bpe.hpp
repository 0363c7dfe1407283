#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ad/token_sequence.hpp"

namespace ad {

// Byte-level BPE. The base alphabet is the 256 byte values, so coverage is
// total and encode/decode is lossless on arbitrary UTF-8 (or any bytes).
// Token ids: 0..255 base bytes, then one id per merge in rank order, then
// the special tokens.
class BpeVocab {
  public:
    BpeVocab() = default;

    // Greedy merge training: repeatedly merge the most frequent adjacent
    // token pair over the byte-encoded corpus; ties broken by lexicographic
    // order of the (left, right) byte strings. Stops early when no pair
    // occurs at least twice.
    static BpeVocab train(const std::vector<std::string>& corpus, std::size_t num_merges);

    TokenSequence encode(const std::string& text) const;
    std::string decode(const TokenSequence& seq) const;

    int special_id(SpecialToken s) const { return static_cast<int>(token_bytes_.size()) + static_cast<int>(s); }
    bool is_special(int id) const { return id >= static_cast<int>(token_bytes_.size()) && id < vocab_size(); }
    int vocab_size() const { return static_cast<int>(token_bytes_.size()) + kNumSpecialTokens; }
    std::size_t num_merges() const { return merges_.size(); }

    // Byte expansion of a regular token id (debugging / decode).
    const std::string& token_bytes(int id) const { return token_bytes_.at(static_cast<std::size_t>(id)); }

    // "v1" header, then one merge per line "left<TAB>right" with bytes
    // rendered as escaped strings.
    std::string serialize() const;
    static BpeVocab deserialize(const std::string& text);

  private:
    void rebuild_tables();

    std::vector<std::pair<std::string, std::string>> merges_;  // rank = position
    std::vector<std::string> token_bytes_;                     // id -> byte expansion
    std::unordered_map<std::string, int> token_ids_;           // byte expansion -> id
    std::unordered_map<std::uint64_t, int> merge_rank_;        // (left_id, right_id) -> rank
};

// Escaped rendering of a byte string: printable ASCII as-is, backslash and
// tab escaped, everything else \xHH.
std::string escape_bytes(const std::string& bytes);
std::string unescape_bytes(const std::string& text);

}  // namespace ad
