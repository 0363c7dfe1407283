#pragma once

#include <string>
#include <vector>

namespace ad {

struct TokenSequence {
    std::vector<int> ids;

    std::size_t length() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
};

// Special tokens shared by both vocabularies. Order is fixed; ids are
// assigned per vocabulary (appended after the regular tokens).
enum class SpecialToken { Cls = 0, Sep, Pad, Mask, AcrOpen, AcrClose };

inline constexpr int kNumSpecialTokens = 6;

inline const char* special_token_name(SpecialToken s) {
    switch (s) {
        case SpecialToken::Cls: return "[CLS]";
        case SpecialToken::Sep: return "[SEP]";
        case SpecialToken::Pad: return "[PAD]";
        case SpecialToken::Mask: return "[MASK]";
        case SpecialToken::AcrOpen: return "[ACR]";
        case SpecialToken::AcrClose: return "[/ACR]";
    }
    return "?";
}

}  // namespace ad
