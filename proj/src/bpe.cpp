#include "ad/bpe.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ad {

namespace {

inline std::uint64_t pair_key(int left, int right) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
           static_cast<std::uint32_t>(right);
}

char hex_digit(unsigned v) { return v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10); }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::runtime_error("invalid hex digit in escaped byte string");
}

}  // namespace

std::string escape_bytes(const std::string& bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (unsigned char c : bytes) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c == '\t') {
            out += "\\t";
        } else if (c >= 0x21 && c <= 0x7e) {
            out += static_cast<char>(c);
        } else {
            out += "\\x";
            out += hex_digit(c >> 4);
            out += hex_digit(c & 0xf);
        }
    }
    return out;
}

std::string unescape_bytes(const std::string& text) {
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (i + 1 >= text.size()) throw std::runtime_error("truncated escape in byte string");
        char c = text[++i];
        if (c == '\\') {
            out += '\\';
        } else if (c == 't') {
            out += '\t';
        } else if (c == 'x') {
            if (i + 2 >= text.size()) throw std::runtime_error("truncated \\x escape");
            out += static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2]));
            i += 2;
        } else {
            throw std::runtime_error("unknown escape in byte string");
        }
    }
    return out;
}

void BpeVocab::rebuild_tables() {
    token_bytes_.clear();
    token_ids_.clear();
    merge_rank_.clear();
    token_bytes_.reserve(256 + merges_.size());
    for (int b = 0; b < 256; ++b)
        token_bytes_.push_back(std::string(1, static_cast<char>(b)));
    for (std::size_t i = 0; i < token_bytes_.size(); ++i)
        token_ids_[token_bytes_[i]] = static_cast<int>(i);
    for (std::size_t r = 0; r < merges_.size(); ++r) {
        const auto& [left, right] = merges_[r];
        auto li = token_ids_.find(left);
        auto ri = token_ids_.find(right);
        if (li == token_ids_.end() || ri == token_ids_.end())
            throw std::runtime_error("merge operand is neither a base byte nor an earlier merge");
        merge_rank_.emplace(pair_key(li->second, ri->second), static_cast<int>(r));
        const std::string merged = left + right;
        const int id = static_cast<int>(token_bytes_.size());
        token_bytes_.push_back(merged);
        token_ids_.emplace(merged, id);  // first occurrence is canonical
    }
}

BpeVocab BpeVocab::train(const std::vector<std::string>& corpus, std::size_t num_merges) {
    if (corpus.empty()) throw std::invalid_argument("bpe_train: empty corpus");
    std::vector<std::vector<std::string>> seqs;
    seqs.reserve(corpus.size());
    for (const auto& s : corpus) {
        std::vector<std::string> seq;
        seq.reserve(s.size());
        for (char c : s) seq.emplace_back(1, c);
        seqs.push_back(std::move(seq));
    }

    BpeVocab vocab;
    for (std::size_t step = 0; step < num_merges; ++step) {
        // std::map gives the lexicographic tie-break for free.
        std::map<std::pair<std::string, std::string>, std::size_t> counts;
        for (const auto& seq : seqs)
            for (std::size_t i = 0; i + 1 < seq.size(); ++i)
                ++counts[{seq[i], seq[i + 1]}];
        const std::pair<std::string, std::string>* best = nullptr;
        std::size_t best_count = 1;  // a pair must occur at least twice to be merged
        for (const auto& [pair, count] : counts) {
            if (count > best_count) {
                best = &pair;
                best_count = count;
            }
        }
        if (!best) break;
        const std::string left = best->first, right = best->second;
        const std::string merged = left + right;
        for (auto& seq : seqs) {
            std::vector<std::string> out;
            out.reserve(seq.size());
            for (std::size_t i = 0; i < seq.size();) {
                if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
                    out.push_back(merged);
                    i += 2;
                } else {
                    out.push_back(seq[i]);
                    ++i;
                }
            }
            seq = std::move(out);
        }
        vocab.merges_.emplace_back(left, right);
    }
    vocab.rebuild_tables();
    return vocab;
}

TokenSequence BpeVocab::encode(const std::string& text) const {
    TokenSequence seq;
    seq.ids.reserve(text.size());
    for (unsigned char c : text) seq.ids.push_back(static_cast<int>(c));
    if (merge_rank_.empty()) return seq;
    // Repeatedly apply the lowest-rank applicable merge until fixpoint.
    while (seq.ids.size() >= 2) {
        int best_rank = -1;
        for (std::size_t i = 0; i + 1 < seq.ids.size(); ++i) {
            auto it = merge_rank_.find(pair_key(seq.ids[i], seq.ids[i + 1]));
            if (it != merge_rank_.end() && (best_rank < 0 || it->second < best_rank))
                best_rank = it->second;
        }
        if (best_rank < 0) break;
        const auto& [left, right] = merges_[static_cast<std::size_t>(best_rank)];
        const int merged_id = token_ids_.at(left + right);
        const int left_id = token_ids_.at(left), right_id = token_ids_.at(right);
        std::vector<int> out;
        out.reserve(seq.ids.size());
        for (std::size_t i = 0; i < seq.ids.size();) {
            if (i + 1 < seq.ids.size() && seq.ids[i] == left_id && seq.ids[i + 1] == right_id) {
                out.push_back(merged_id);
                i += 2;
            } else {
                out.push_back(seq.ids[i]);
                ++i;
            }
        }
        seq.ids = std::move(out);
    }
    return seq;
}

std::string BpeVocab::decode(const TokenSequence& seq) const {
    std::string out;
    for (int id : seq.ids) {
        if (id < 0 || id >= vocab_size()) throw std::out_of_range("bpe_decode: invalid token id");
        if (is_special(id)) continue;
        out += token_bytes_[static_cast<std::size_t>(id)];
    }
    return out;
}

std::string BpeVocab::serialize() const {
    std::ostringstream os;
    os << "bpe-vocab v1\n";
    for (const auto& [left, right] : merges_)
        os << escape_bytes(left) << '\t' << escape_bytes(right) << '\n';
    return os.str();
}

BpeVocab BpeVocab::deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "bpe-vocab v1")
        throw std::runtime_error("bpe vocab: bad or missing version header");
    BpeVocab vocab;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw std::runtime_error("bpe vocab: merge line missing tab");
        vocab.merges_.emplace_back(unescape_bytes(line.substr(0, tab)),
                                   unescape_bytes(line.substr(tab + 1)));
    }
    vocab.rebuild_tables();
    return vocab;
}

}  // namespace ad
