#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ad/token_sequence.hpp"

namespace ad {

// WordPiece-style vocabulary: word-initial units plus "##"-prefixed
// continuation units. Encoding is greedy longest-match-first per word; a
// word with no full segmentation maps to the single unk token.
class WordPieceVocab {
  public:
    WordPieceVocab() = default;

    // Frequency-driven merge construction over whitespace-split words,
    // truncated to target_size tokens (specials and unk included).
    // Deterministic; pair-frequency ties broken lexicographically.
    static WordPieceVocab build(const std::vector<std::string>& corpus, std::size_t target_size);

    // tokens are pre-split words.
    TokenSequence encode(const std::vector<std::string>& words) const;

    // Token strings for a sequence (debugging / tests).
    std::vector<std::string> pieces(const TokenSequence& seq) const;

    int unk_id() const { return unk_id_; }
    int special_id(SpecialToken s) const { return special_ids_[static_cast<int>(s)]; }
    int vocab_size() const { return static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // One token per line; line number = id.
    std::string serialize() const;
    static WordPieceVocab deserialize(const std::string& text);

  private:
    void index_tokens();

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> token_ids_;
    int unk_id_ = -1;
    int special_ids_[kNumSpecialTokens] = {-1, -1, -1, -1, -1, -1};
    std::size_t max_token_cps_ = 0;  // longest token in codepoints, bounds the match scan
};

inline constexpr const char* kWordPieceUnk = "[UNK]";

// Splits a UTF-8 string into codepoint substrings (invalid bytes pass
// through as single-byte units).
std::vector<std::string> utf8_codepoints(const std::string& s);

std::vector<std::string> split_whitespace(const std::string& s);

}  // namespace ad
