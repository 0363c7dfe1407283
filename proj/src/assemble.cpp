#include "ad/assemble.hpp"

#include "ad/errors.hpp"

namespace ad {

SeqBuilder bpe_builder(const BpeVocab& vocab) {
    SeqBuilder b;
    b.encode_word = [&vocab](const std::string& word) { return vocab.encode(word).ids; };
    b.cls = vocab.special_id(SpecialToken::Cls);
    b.sep = vocab.special_id(SpecialToken::Sep);
    b.acr_open = vocab.special_id(SpecialToken::AcrOpen);
    b.acr_close = vocab.special_id(SpecialToken::AcrClose);
    return b;
}

SeqBuilder wp_builder(const WordPieceVocab& vocab) {
    SeqBuilder b;
    b.encode_word = [&vocab](const std::string& word) { return vocab.encode({word}).ids; };
    b.cls = vocab.special_id(SpecialToken::Cls);
    b.sep = vocab.special_id(SpecialToken::Sep);
    b.acr_open = vocab.special_id(SpecialToken::AcrOpen);
    b.acr_close = vocab.special_id(SpecialToken::AcrClose);
    return b;
}

TokenSequence assemble_pair(const SeqBuilder& b, const std::vector<std::string>& sentence_tokens,
                            std::size_t acronym_index, const std::string& long_form,
                            std::size_t max_len) {
    if (acronym_index >= sentence_tokens.size())
        throw ValidationError("assemble_pair: acronym_index out of range");

    std::vector<int> pre, region, post, lf;
    for (std::size_t i = 0; i < acronym_index; ++i) {
        auto ids = b.encode_word(sentence_tokens[i]);
        pre.insert(pre.end(), ids.begin(), ids.end());
    }
    region.push_back(b.acr_open);
    {
        auto ids = b.encode_word(sentence_tokens[acronym_index]);
        region.insert(region.end(), ids.begin(), ids.end());
    }
    region.push_back(b.acr_close);
    for (std::size_t i = acronym_index + 1; i < sentence_tokens.size(); ++i) {
        auto ids = b.encode_word(sentence_tokens[i]);
        post.insert(post.end(), ids.begin(), ids.end());
    }
    for (const auto& word : split_whitespace(long_form)) {
        auto ids = b.encode_word(word);
        lf.insert(lf.end(), ids.begin(), ids.end());
    }

    const std::size_t fixed = 3 + region.size();  // CLS + region + SEP + SEP
    if (fixed > max_len)
        throw ValidationError("assemble_pair: marked acronym region alone exceeds max_len");

    std::size_t total = fixed + pre.size() + post.size() + lf.size();
    // Sentence tokens trimmed from the right first, then long-form tokens.
    while (total > max_len && !post.empty()) {
        post.pop_back();
        --total;
    }
    while (total > max_len && !pre.empty()) {
        pre.pop_back();
        --total;
    }
    while (total > max_len && !lf.empty()) {
        lf.pop_back();
        --total;
    }

    TokenSequence seq;
    seq.ids.reserve(total);
    seq.ids.push_back(b.cls);
    seq.ids.insert(seq.ids.end(), pre.begin(), pre.end());
    seq.ids.insert(seq.ids.end(), region.begin(), region.end());
    seq.ids.insert(seq.ids.end(), post.begin(), post.end());
    seq.ids.push_back(b.sep);
    seq.ids.insert(seq.ids.end(), lf.begin(), lf.end());
    seq.ids.push_back(b.sep);
    return seq;
}

}  // namespace ad
