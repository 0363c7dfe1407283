#include "ad/wordpiece.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ad {

std::vector<std::string> utf8_codepoints(const std::string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if ((c & 0x80) == 0x00) len = 1;
        else if ((c & 0xe0) == 0xc0) len = 2;
        else if ((c & 0xf0) == 0xe0) len = 3;
        else if ((c & 0xf8) == 0xf0) len = 4;
        if (i + len > s.size()) len = 1;
        // continuation bytes must match, else treat lead byte as a unit
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) {
                len = 1;
                break;
            }
        }
        out.push_back(s.substr(i, len));
        i += len;
    }
    return out;
}

std::vector<std::string> split_whitespace(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

namespace {

std::string strip_continuation(const std::string& sym) {
    return sym.size() > 2 && sym.compare(0, 2, "##") == 0 ? sym.substr(2) : sym;
}

}  // namespace

void WordPieceVocab::index_tokens() {
    token_ids_.clear();
    max_token_cps_ = 0;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const std::string& tok = tokens_[i];
        if (token_ids_.count(tok)) throw std::runtime_error("wordpiece vocab: duplicate token " + tok);
        token_ids_[tok] = static_cast<int>(i);
        const std::string body = strip_continuation(tok);
        max_token_cps_ = std::max(max_token_cps_, utf8_codepoints(body).size());
    }
    auto it = token_ids_.find(kWordPieceUnk);
    if (it == token_ids_.end()) throw std::runtime_error("wordpiece vocab: unk token missing");
    unk_id_ = it->second;
    for (int s = 0; s < kNumSpecialTokens; ++s) {
        auto sit = token_ids_.find(special_token_name(static_cast<SpecialToken>(s)));
        if (sit == token_ids_.end()) throw std::runtime_error("wordpiece vocab: special token missing");
        special_ids_[s] = sit->second;
    }
}

WordPieceVocab WordPieceVocab::build(const std::vector<std::string>& corpus, std::size_t target_size) {
    if (corpus.empty()) throw std::invalid_argument("wp_build_vocab: empty corpus");

    // Word frequency table over whitespace-split words.
    std::map<std::string, std::size_t> word_freq;
    for (const auto& line : corpus)
        for (const auto& w : split_whitespace(line)) ++word_freq[w];

    // Each word starts as its codepoints; non-initial symbols carry "##".
    struct WordEntry {
        std::vector<std::string> symbols;
        std::size_t freq;
    };
    std::vector<WordEntry> words;
    std::set<std::string> base_units;
    for (const auto& [w, f] : word_freq) {
        WordEntry e;
        e.freq = f;
        auto cps = utf8_codepoints(w);
        for (std::size_t i = 0; i < cps.size(); ++i)
            e.symbols.push_back(i == 0 ? cps[i] : "##" + cps[i]);
        for (const auto& s : e.symbols) base_units.insert(s);
        words.push_back(std::move(e));
    }

    const std::size_t fixed = kNumSpecialTokens + 1 + base_units.size();  // specials, unk, alphabet
    if (target_size <= fixed)
        throw std::invalid_argument("wp_build_vocab: target_size must exceed specials + unk + alphabet (" +
                                    std::to_string(fixed) + ")");

    std::vector<std::string> tokens;
    for (int s = 0; s < kNumSpecialTokens; ++s)
        tokens.push_back(special_token_name(static_cast<SpecialToken>(s)));
    tokens.push_back(kWordPieceUnk);
    tokens.insert(tokens.end(), base_units.begin(), base_units.end());
    std::unordered_set<std::string> present(tokens.begin(), tokens.end());

    while (tokens.size() < target_size) {
        std::map<std::pair<std::string, std::string>, std::size_t> counts;
        for (const auto& e : words)
            for (std::size_t i = 0; i + 1 < e.symbols.size(); ++i)
                counts[{e.symbols[i], e.symbols[i + 1]}] += e.freq;
        const std::pair<std::string, std::string>* best = nullptr;
        std::size_t best_count = 1;
        for (const auto& [pair, count] : counts) {
            if (count > best_count) {
                best = &pair;
                best_count = count;
            }
        }
        if (!best) break;
        const std::string left = best->first, right = best->second;
        const std::string merged = left + strip_continuation(right);
        for (auto& e : words) {
            std::vector<std::string> out;
            out.reserve(e.symbols.size());
            for (std::size_t i = 0; i < e.symbols.size();) {
                if (i + 1 < e.symbols.size() && e.symbols[i] == left && e.symbols[i + 1] == right) {
                    out.push_back(merged);
                    i += 2;
                } else {
                    out.push_back(e.symbols[i]);
                    ++i;
                }
            }
            e.symbols = std::move(out);
        }
        if (present.insert(merged).second) tokens.push_back(merged);
    }

    WordPieceVocab vocab;
    vocab.tokens_ = std::move(tokens);
    vocab.index_tokens();
    return vocab;
}

TokenSequence WordPieceVocab::encode(const std::vector<std::string>& words) const {
    TokenSequence seq;
    for (const auto& word : words) {
        const auto cps = utf8_codepoints(word);
        std::vector<int> piece_ids;
        bool ok = !cps.empty();
        std::size_t pos = 0;
        while (pos < cps.size()) {
            // longest-match-first from the left
            const std::size_t max_len = std::min(cps.size() - pos, max_token_cps_);
            int match = -1;
            for (std::size_t len = max_len; len >= 1; --len) {
                std::string cand = pos > 0 ? "##" : "";
                for (std::size_t k = 0; k < len; ++k) cand += cps[pos + k];
                auto it = token_ids_.find(cand);
                if (it != token_ids_.end()) {
                    match = it->second;
                    pos += len;
                    break;
                }
            }
            if (match < 0) {
                ok = false;
                break;
            }
            piece_ids.push_back(match);
        }
        if (!ok) {
            seq.ids.push_back(unk_id_);
        } else {
            seq.ids.insert(seq.ids.end(), piece_ids.begin(), piece_ids.end());
        }
    }
    return seq;
}

std::vector<std::string> WordPieceVocab::pieces(const TokenSequence& seq) const {
    std::vector<std::string> out;
    for (int id : seq.ids) {
        if (id < 0 || id >= vocab_size()) throw std::out_of_range("wordpiece: invalid token id");
        out.push_back(tokens_[static_cast<std::size_t>(id)]);
    }
    return out;
}

std::string WordPieceVocab::serialize() const {
    std::string out;
    for (const auto& tok : tokens_) {
        out += tok;
        out += '\n';
    }
    return out;
}

WordPieceVocab WordPieceVocab::deserialize(const std::string& text) {
    WordPieceVocab vocab;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) vocab.tokens_.push_back(line);
    vocab.index_tokens();
    return vocab;
}

}  // namespace ad
