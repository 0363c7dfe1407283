#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ad/bpe.hpp"
#include "ad/token_sequence.hpp"
#include "ad/wordpiece.hpp"

namespace ad {

// Adapter over a vocabulary: per-word subword encoding plus the special ids
// assemble_pair needs. Both tokenization paths implement this surface.
struct SeqBuilder {
    std::function<std::vector<int>(const std::string&)> encode_word;
    int cls, sep, acr_open, acr_close;
};

SeqBuilder bpe_builder(const BpeVocab& vocab);
SeqBuilder wp_builder(const WordPieceVocab& vocab);

// Layout: CLS, sentence subwords with ACR_OPEN/ACR_CLOSE around the acronym
// token, SEP, long-form subwords, SEP. Over-long inputs are truncated by
// trimming sentence subwords from the right (the marked acronym region is
// never dropped) and only then long-form subwords. Throws if the fixed part
// (CLS + marked region + two SEP) alone exceeds max_len.
TokenSequence assemble_pair(const SeqBuilder& b, const std::vector<std::string>& sentence_tokens,
                            std::size_t acronym_index, const std::string& long_form,
                            std::size_t max_len);

}  // namespace ad
