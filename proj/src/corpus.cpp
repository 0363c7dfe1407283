#include "ad/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ad/rng.hpp"
#include "json.hpp"

namespace ad {

using ordered_json = nlohmann::ordered_json;

void Dictionary::add(const std::string& acronym, std::vector<std::string> long_forms) {
    if (acronym.empty()) throw ValidationError("dictionary: empty acronym string");
    if (long_forms.empty()) throw ValidationError("dictionary: acronym '" + acronym + "' has no long forms");
    std::unordered_set<std::string> seen;
    for (const auto& lf : long_forms)
        if (!seen.insert(lf).second)
            throw ValidationError("dictionary: duplicate long form '" + lf + "' under acronym '" + acronym + "'");
    if (index_.count(acronym)) throw ValidationError("dictionary: duplicate acronym '" + acronym + "'");
    order_.push_back(acronym);
    index_[acronym] = std::move(long_forms);
}

const std::vector<std::string>& Dictionary::candidates(const std::string& acronym) const {
    auto it = index_.find(acronym);
    if (it == index_.end()) throw ValidationError("dictionary: unknown acronym '" + acronym + "'");
    return it->second;
}

int Dictionary::candidate_index(const std::string& acronym, const std::string& long_form) const {
    const auto& cands = candidates(acronym);
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (cands[i] == long_form) return static_cast<int>(i);
    return -1;
}

Dictionary load_dictionary(const std::string& content) {
    ordered_json j;
    try {
        j = ordered_json::parse(content);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("dictionary: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("dictionary: top-level value must be an object");
    Dictionary dict;
    for (auto& [acronym, value] : j.items()) {
        if (!value.is_array()) throw ValidationError("dictionary: value for '" + acronym + "' must be an array");
        std::vector<std::string> lfs;
        for (auto& lf : value) {
            if (!lf.is_string()) throw ValidationError("dictionary: long forms of '" + acronym + "' must be strings");
            lfs.push_back(lf.get<std::string>());
        }
        dict.add(acronym, std::move(lfs));
    }
    return dict;
}

std::string serialize_dictionary(const Dictionary& dict) {
    ordered_json j = ordered_json::object();
    for (const auto& acr : dict.acronyms()) j[acr] = dict.candidates(acr);
    return j.dump(2) + "\n";
}

namespace {

std::string mapped_field(const FieldAdapter& adapter, const std::string& canonical) {
    auto it = adapter.find(canonical);
    return it == adapter.end() ? canonical : it->second;
}

}  // namespace

std::vector<SentenceSample> load_samples(const std::string& content, const Dictionary& dict,
                                         bool require_gold, const FieldAdapter& adapter) {
    ordered_json j;
    try {
        j = ordered_json::parse(content);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("samples: malformed JSON: ") + e.what());
    }
    if (!j.is_array()) throw ValidationError("samples: top-level value must be an array");

    const std::string f_id = mapped_field(adapter, "id");
    const std::string f_tokens = mapped_field(adapter, "tokens");
    const std::string f_index = mapped_field(adapter, "acronym_index");
    const std::string f_long_form = mapped_field(adapter, "long_form");

    std::vector<SentenceSample> samples;
    samples.reserve(j.size());
    std::size_t record = 0;
    for (auto& rec : j) {
        const std::string where = "samples[" + std::to_string(record++) + "]";
        if (!rec.is_object()) throw ValidationError(where + ": record must be an object");
        SentenceSample s;
        if (!rec.contains(f_id) || !rec[f_id].is_string())
            throw ValidationError(where + ": missing string field '" + f_id + "'");
        s.id = rec[f_id].get<std::string>();
        if (!rec.contains(f_tokens) || !rec[f_tokens].is_array())
            throw ValidationError(where + " (" + s.id + "): missing token array '" + f_tokens + "'");
        for (auto& tok : rec[f_tokens]) {
            if (!tok.is_string()) throw ValidationError(where + " (" + s.id + "): tokens must be strings");
            s.tokens.push_back(tok.get<std::string>());
        }
        if (!rec.contains(f_index) || !rec[f_index].is_number_integer())
            throw ValidationError(where + " (" + s.id + "): missing integer field '" + f_index + "'");
        const long long idx = rec[f_index].get<long long>();
        if (idx < 0 || static_cast<std::size_t>(idx) >= s.tokens.size())
            throw ValidationError(where + " (" + s.id + "): acronym_index " + std::to_string(idx) +
                                  " out of range for " + std::to_string(s.tokens.size()) + " tokens");
        s.acronym_index = static_cast<std::size_t>(idx);
        const std::string& acr = s.tokens[s.acronym_index];
        if (!dict.has(acr))
            throw ValidationError(where + " (" + s.id + "): token '" + acr + "' at acronym_index is not in the dictionary");
        if (rec.contains(f_long_form) && !rec[f_long_form].is_null()) {
            if (!rec[f_long_form].is_string())
                throw ValidationError(where + " (" + s.id + "): '" + f_long_form + "' must be a string");
            s.gold_long_form = rec[f_long_form].get<std::string>();
            if (dict.candidate_index(acr, *s.gold_long_form) < 0)
                throw ValidationError(where + " (" + s.id + "): gold long form '" + *s.gold_long_form +
                                      "' is not a candidate of '" + acr + "'");
        } else if (require_gold) {
            throw ValidationError(where + " (" + s.id + "): gold long form required but missing");
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

std::string serialize_samples(const std::vector<SentenceSample>& samples) {
    ordered_json j = ordered_json::array();
    for (const auto& s : samples) {
        ordered_json rec = ordered_json::object();
        rec["id"] = s.id;
        rec["tokens"] = s.tokens;
        rec["acronym_index"] = s.acronym_index;
        if (s.gold_long_form) rec["long_form"] = *s.gold_long_form;
        j.push_back(std::move(rec));
    }
    return j.dump(2) + "\n";
}

std::vector<PairExample> build_pairs(const std::vector<SentenceSample>& samples,
                                     const Dictionary& dict, UpsampleMode mode) {
    std::vector<PairExample> pairs;
    for (const auto& s : samples) {
        if (!s.gold_long_form)
            throw ValidationError("build_pairs: sample '" + s.id + "' has no gold long form");
        const auto& cands = dict.candidates(s.tokens[s.acronym_index]);
        const std::size_t k = cands.size();
        for (const auto& cand : cands) {
            PairExample p;
            p.sample_id = s.id;
            p.tokens = s.tokens;
            p.acronym_index = s.acronym_index;
            p.candidate_long_form = cand;
            p.label = cand == *s.gold_long_form ? 1 : 0;
            pairs.push_back(std::move(p));
        }
        // Replicated positives are appended after the candidate-order block.
        std::size_t extra = 0;
        if (mode == UpsampleMode::Full) extra = k - 1;                    // k positives total
        else if (mode == UpsampleMode::Balanced && k >= 2) extra = k - 2; // k-1 positives total
        for (std::size_t i = 0; i < extra; ++i) {
            PairExample p;
            p.sample_id = s.id;
            p.tokens = s.tokens;
            p.acronym_index = s.acronym_index;
            p.candidate_long_form = *s.gold_long_form;
            p.label = 1;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

std::string serialize_pairs(const std::vector<PairExample>& pairs) {
    ordered_json j = ordered_json::array();
    for (const auto& p : pairs) {
        ordered_json rec = ordered_json::object();
        rec["sample_id"] = p.sample_id;
        rec["tokens"] = p.tokens;
        rec["acronym_index"] = p.acronym_index;
        rec["candidate_long_form"] = p.candidate_long_form;
        rec["label"] = p.label;
        j.push_back(std::move(rec));
    }
    return j.dump(2) + "\n";
}

namespace {

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

}  // namespace

CorpusStats compute_stats(const std::vector<SentenceSample>& samples, const Dictionary& dict) {
    if (samples.empty()) throw ValidationError("compute_stats: empty sample list");
    CorpusStats stats;
    stats.num_acronyms = dict.size();

    std::set<std::string> attested;
    double token_total = 0.0;
    std::size_t overlapping = 0;
    // Long-form token unions per acronym, lowercased, built lazily.
    std::unordered_map<std::string, std::unordered_set<std::string>> lf_tokens;
    for (const auto& s : samples) {
        const std::string& acr = s.tokens[s.acronym_index];
        attested.insert(acr);
        token_total += static_cast<double>(s.tokens.size());
        auto it = lf_tokens.find(acr);
        if (it == lf_tokens.end()) {
            std::unordered_set<std::string> words;
            for (const auto& lf : dict.candidates(acr)) {
                std::istringstream is(lf);
                std::string w;
                while (is >> w) words.insert(lower_ascii(w));
            }
            it = lf_tokens.emplace(acr, std::move(words)).first;
        }
        bool found = false;
        for (std::size_t i = 0; i < s.tokens.size() && !found; ++i) {
            if (i == s.acronym_index) continue;  // the acronym token itself is excluded
            found = it->second.count(lower_ascii(s.tokens[i])) != 0;
        }
        if (found) ++overlapping;
    }
    stats.num_acronyms_attested = attested.size();
    double lf_sum = 0.0;
    for (const auto& acr : attested) lf_sum += static_cast<double>(dict.candidates(acr).size());
    stats.avg_long_forms_per_acronym = lf_sum / static_cast<double>(attested.size());
    stats.avg_sentence_length = token_total / static_cast<double>(samples.size());
    stats.overlap_ratio = static_cast<double>(overlapping) / static_cast<double>(samples.size());
    return stats;
}

void SynthConfig::validate() const {
    if (num_acronyms == 0) throw ValidationError("synth config: num_acronyms must be positive");
    if (min_long_forms < 2) throw ValidationError("synth config: min_long_forms must be >= 2 (ambiguity required)");
    if (max_long_forms < min_long_forms) throw ValidationError("synth config: max_long_forms < min_long_forms");
    if (sentences_per_long_form == 0) throw ValidationError("synth config: zero sentences per long form");
    if (cue_strength < 0.0 || cue_strength > 1.0) throw ValidationError("synth config: cue_strength outside [0,1]");
    const double sum = train_fraction + dev_fraction + test_fraction;
    if (train_fraction < 0 || dev_fraction < 0 || test_fraction < 0 || std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("synth config: split fractions must be non-negative and sum to 1");
}

namespace {

const char* kSyllables[] = {"ka", "lo", "mi", "ra", "tu", "ne", "so", "vi", "del", "pan",
                            "qu", "zor", "fen", "bal", "tek", "rum", "sha", "gli", "wex", "dov"};

const char* kFillers[] = {"the",  "of",    "in",     "we",     "study",  "using", "with",   "results",
                          "show", "that",  "method", "based",  "on",     "for",   "a",      "an",
                          "is",   "are",   "this",   "during", "between", "under", "across", "each",
                          "from", "which", "our",    "new",    "analysis", "observed", "measured", "applied"};

// Globally unique fabricated content word.
std::string synth_word(std::size_t counter) {
    std::string w;
    std::size_t x = counter;
    for (int i = 0; i < 3; ++i) {
        w += kSyllables[x % 20];
        x /= 20;
    }
    return w + std::to_string(counter);
}

std::string synth_acronym(std::size_t i) {
    std::string a(3, 'A');
    a[2] = static_cast<char>('A' + i % 26);
    a[1] = static_cast<char>('A' + (i / 26) % 26);
    a[0] = static_cast<char>('A' + (i / 676) % 26);
    return a;
}

}  // namespace

SynthCorpus gen_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    RngStream rng(derive_seed(cfg.seed, "gen_synthetic"));
    SynthCorpus corpus;

    constexpr std::size_t kWordsPerLongForm = 3;
    std::size_t word_counter = 0;
    std::vector<std::vector<std::vector<std::string>>> lf_words(cfg.num_acronyms);

    for (std::size_t i = 0; i < cfg.num_acronyms; ++i) {
        const std::size_t k =
            cfg.min_long_forms + (cfg.max_long_forms > cfg.min_long_forms
                                      ? rng.below(cfg.max_long_forms - cfg.min_long_forms + 1)
                                      : 0);
        std::vector<std::string> lfs;
        lf_words[i].resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            std::string lf;
            for (std::size_t m = 0; m < kWordsPerLongForm; ++m) {
                const std::string w = synth_word(word_counter++);
                lf_words[i][j].push_back(w);
                if (m) lf += ' ';
                lf += w;
            }
            lfs.push_back(lf);
        }
        corpus.dict.add(synth_acronym(i), std::move(lfs));
    }

    const std::size_t n_fillers = sizeof(kFillers) / sizeof(kFillers[0]);
    std::size_t sample_counter = 0;
    for (std::size_t i = 0; i < cfg.num_acronyms; ++i) {
        const std::string acr = synth_acronym(i);
        for (std::size_t j = 0; j < lf_words[i].size(); ++j) {
            const std::string& gold = corpus.dict.candidates(acr)[j];
            std::vector<SentenceSample> group;
            for (std::size_t n = 0; n < cfg.sentences_per_long_form; ++n) {
                SentenceSample s;
                char idbuf[32];
                std::snprintf(idbuf, sizeof(idbuf), "SYN-%06zu", sample_counter++);
                s.id = idbuf;
                const std::size_t len = 7 + rng.below(4);
                for (std::size_t t = 0; t < len; ++t)
                    s.tokens.push_back(kFillers[rng.below(n_fillers)]);
                // cue words: each gold long-form word lands in its own filler
                // slot with the configured probability, so at strength 1.0
                // every sentence carries at least one unique cue token
                std::vector<std::size_t> slots(len);
                std::iota(slots.begin(), slots.end(), 0);
                for (std::size_t n2 = len; n2 > len - kWordsPerLongForm; --n2)
                    std::swap(slots[n2 - 1], slots[rng.below(n2)]);
                for (std::size_t m = 0; m < kWordsPerLongForm; ++m)
                    if (rng.uniform() < cfg.cue_strength)
                        s.tokens[slots[len - 1 - m]] = lf_words[i][j][m];
                s.acronym_index = rng.below(len + 1);
                s.tokens.insert(s.tokens.begin() + static_cast<std::ptrdiff_t>(s.acronym_index), acr);
                s.gold_long_form = gold;
                group.push_back(std::move(s));
            }
            // stratified split so every long form is present in every split
            for (std::size_t n = group.size(); n > 1; --n)
                std::swap(group[n - 1], group[rng.below(n)]);
            const std::size_t n_train =
                static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(group.size()) + 1e-9));
            std::size_t n_dev =
                static_cast<std::size_t>(std::floor(cfg.dev_fraction * static_cast<double>(group.size()) + 0.5));
            // keep dev non-empty when requested, without starving the test split
            if (n_dev == 0 && cfg.dev_fraction > 0.0 && group.size() > n_train + 1) n_dev = 1;
            if (n_train + n_dev > group.size()) n_dev = group.size() - n_train;
            for (std::size_t n = 0; n < group.size(); ++n) {
                if (n < n_train) corpus.train.push_back(std::move(group[n]));
                else if (n < n_train + n_dev) corpus.dev.push_back(std::move(group[n]));
                else corpus.test.push_back(std::move(group[n]));
            }
        }
    }
    // stable order within each split
    auto by_id = [](const SentenceSample& a, const SentenceSample& b) { return a.id < b.id; };
    std::sort(corpus.train.begin(), corpus.train.end(), by_id);
    std::sort(corpus.dev.begin(), corpus.dev.end(), by_id);
    std::sort(corpus.test.begin(), corpus.test.end(), by_id);
    return corpus;
}

}  // namespace ad
