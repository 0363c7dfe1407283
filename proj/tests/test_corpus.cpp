#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ad/corpus.hpp"
#include "ad/rng.hpp"
#include "doctest.h"

using namespace ad;

namespace {

Dictionary tiny_dict() {
    Dictionary d;
    d.add("CNN", {"convolutional neural network", "cable news network"});
    d.add("SVM", {"support vector machine", "state vector machine", "space vector modulation"});
    return d;
}

SentenceSample sample(std::string id, std::vector<std::string> tokens, std::size_t idx,
                      std::string gold) {
    SentenceSample s;
    s.id = std::move(id);
    s.tokens = std::move(tokens);
    s.acronym_index = idx;
    s.gold_long_form = std::move(gold);
    return s;
}

}  // namespace

TEST_CASE("dictionary order and candidate lookup") {
    Dictionary d = tiny_dict();
    CHECK(d.size() == 2);
    CHECK(d.acronyms()[0] == "CNN");
    CHECK(d.candidates("SVM").size() == 3);
    CHECK(d.candidate_index("SVM", "state vector machine") == 1);
    CHECK(d.candidate_index("SVM", "missing") == -1);
    CHECK_THROWS_AS((void)d.candidates("XYZ"), ValidationError);
}

TEST_CASE("dictionary serialization round trips byte for byte") {
    Dictionary d = tiny_dict();
    const std::string once = serialize_dictionary(d);
    Dictionary d2 = load_dictionary(once);
    CHECK(serialize_dictionary(d2) == once);
    CHECK(d2.acronyms() == d.acronyms());
    CHECK(d2.candidates("CNN") == d.candidates("CNN"));
}

TEST_CASE("sample loading validates content") {
    Dictionary d = tiny_dict();

    SUBCASE("round trip") {
        std::vector<SentenceSample> in = {
            sample("a", {"the", "CNN", "model"}, 1, "convolutional neural network")};
        auto out = load_samples(serialize_samples(in), d, true);
        REQUIRE(out.size() == 1);
        CHECK(out[0].id == "a");
        CHECK(out[0].tokens == in[0].tokens);
        CHECK(out[0].acronym_index == 1);
        CHECK(*out[0].gold_long_form == "convolutional neural network");
    }
    SUBCASE("unknown acronym rejected") {
        auto in = sample("a", {"XYZ", "here"}, 0, "whatever");
        CHECK_THROWS_AS(load_samples(serialize_samples({in}), d, true), ValidationError);
    }
    SUBCASE("gold outside candidate list rejected") {
        auto in = sample("a", {"CNN"}, 0, "common noun network");
        CHECK_THROWS_AS(load_samples(serialize_samples({in}), d, true), ValidationError);
    }
    SUBCASE("acronym index out of range rejected") {
        auto in = sample("a", {"CNN"}, 3, "cable news network");
        CHECK_THROWS_AS(load_samples(serialize_samples({in}), d, true), ValidationError);
    }
    SUBCASE("missing gold tolerated only when not required") {
        SentenceSample s;
        s.id = "a";
        s.tokens = {"CNN"};
        s.acronym_index = 0;
        const std::string text = serialize_samples({s});
        CHECK_THROWS_AS(load_samples(text, d, true), ValidationError);
        auto out = load_samples(text, d, false);
        CHECK_FALSE(out[0].gold_long_form.has_value());
    }
}

TEST_CASE("field adapter renames source fields") {
    Dictionary d = tiny_dict();
    const std::string text = R"([{"sid":"x","words":["CNN","rocks"],"pos":0,
                                  "expansion":"cable news network"}])";
    FieldAdapter adapter = {
        {"id", "sid"}, {"tokens", "words"}, {"acronym_index", "pos"}, {"long_form", "expansion"}};
    auto out = load_samples(text, d, true, adapter);
    REQUIRE(out.size() == 1);
    CHECK(out[0].id == "x");
    CHECK(out[0].acronym_index == 0);
    CHECK(*out[0].gold_long_form == "cable news network");
}

TEST_CASE("pair construction counts and labels") {
    Dictionary d = tiny_dict();
    std::vector<SentenceSample> samples = {
        sample("s0", {"CNN", "said"}, 0, "cable news network"),
        sample("s1", {"use", "SVM"}, 1, "support vector machine"),
    };

    SUBCASE("no upsampling: k pairs per sample, dictionary order") {
        auto pairs = build_pairs(samples, d, UpsampleMode::None);
        REQUIRE(pairs.size() == 5);  // 2 + 3
        CHECK(pairs[0].candidate_long_form == "convolutional neural network");
        CHECK(pairs[0].label == 0);
        CHECK(pairs[1].label == 1);
        CHECK(pairs[2].label == 1);
        CHECK(pairs[3].label == 0);
        CHECK(pairs[4].label == 0);
    }
    SUBCASE("full upsampling: 2k-1 pairs, k positives") {
        auto pairs = build_pairs(samples, d, UpsampleMode::Full);
        CHECK(pairs.size() == 3 + 5);
        std::size_t pos = 0;
        for (const auto& p : pairs) pos += static_cast<std::size_t>(p.label);
        CHECK(pos == 2 + 3);
    }
    SUBCASE("balanced upsampling: 2k-2 pairs, k-1 positives (k > 1)") {
        auto pairs = build_pairs(samples, d, UpsampleMode::Balanced);
        CHECK(pairs.size() == 2 + 4);
        std::size_t pos = 0;
        for (const auto& p : pairs) pos += static_cast<std::size_t>(p.label);
        CHECK(pos == 1 + 2);
    }
}

TEST_CASE("pair counts satisfy the closed forms on fuzzed corpora") {
    RngStream rng(99);
    for (int iter = 0; iter < 50; ++iter) {
        Dictionary d;
        const std::size_t n_acr = 1 + rng.below(8);
        std::vector<std::string> acrs;
        for (std::size_t a = 0; a < n_acr; ++a) {
            std::string acr = "A" + std::to_string(a);
            std::vector<std::string> lfs;
            const std::size_t k = 1 + rng.below(6);
            for (std::size_t c = 0; c < k; ++c)
                lfs.push_back("lf " + std::to_string(a) + " " + std::to_string(c));
            d.add(acr, lfs);
            acrs.push_back(acr);
        }
        std::vector<SentenceSample> samples;
        std::size_t sum_k = 0, sum_2k1 = 0, sum_km1 = 0;
        const std::size_t n_samples = rng.below(40);
        for (std::size_t i = 0; i < n_samples; ++i) {
            const std::string& acr = acrs[rng.below(acrs.size())];
            const auto& cands = d.candidates(acr);
            samples.push_back(sample("s" + std::to_string(i), {"w", acr, "w"}, 1,
                                     cands[rng.below(cands.size())]));
            sum_k += cands.size();
            sum_2k1 += 2 * cands.size() - 1;
            sum_km1 += cands.size() - 1;
        }
        CHECK(build_pairs(samples, d, UpsampleMode::None).size() == sum_k);
        auto full = build_pairs(samples, d, UpsampleMode::Full);
        CHECK(full.size() == sum_2k1);
        std::size_t neg = 0;
        for (const auto& p : full) neg += static_cast<std::size_t>(p.label == 0);
        CHECK(neg == sum_km1);
    }
}

TEST_CASE("corpus statistics against a hand-computed oracle") {
    Dictionary d = tiny_dict();
    // s0: 4 tokens, no candidate word in context; s1: 5 tokens, "vector" and
    // "machine" appear, so it overlaps.
    std::vector<SentenceSample> samples = {
        sample("s0", {"the", "CNN", "said", "so"}, 1, "cable news network"),
        sample("s1", {"a", "Vector", "MACHINE", "via", "SVM"}, 4, "support vector machine"),
    };
    CorpusStats st = compute_stats(samples, d);
    CHECK(st.num_acronyms == 2);
    CHECK(st.num_acronyms_attested == 2);
    CHECK(st.avg_long_forms_per_acronym == doctest::Approx(2.5));
    CHECK(st.avg_sentence_length == doctest::Approx(4.5));
    CHECK(st.overlap_ratio == doctest::Approx(0.5));
}

TEST_CASE("synthetic generation is deterministic and well formed") {
    SynthConfig cfg;
    cfg.num_acronyms = 5;
    cfg.sentences_per_long_form = 10;
    cfg.seed = 123;

    SynthCorpus c1 = gen_synthetic(cfg);
    SynthCorpus c2 = gen_synthetic(cfg);
    CHECK(serialize_dictionary(c1.dict) == serialize_dictionary(c2.dict));
    CHECK(serialize_samples(c1.train) == serialize_samples(c2.train));
    CHECK(serialize_samples(c1.dev) == serialize_samples(c2.dev));
    CHECK(serialize_samples(c1.test) == serialize_samples(c2.test));

    cfg.seed = 124;
    SynthCorpus c3 = gen_synthetic(cfg);
    CHECK(serialize_samples(c3.train) != serialize_samples(c1.train));

    CHECK(c1.dict.size() == 5);
    const std::size_t total = c1.train.size() + c1.dev.size() + c1.test.size();
    CHECK(total == 5 * 3 * 10);

    // every (acronym, long form) class is present in every split
    for (const auto* split : {&c1.train, &c1.dev, &c1.test}) {
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& s : *split) seen.insert({s.tokens[s.acronym_index], *s.gold_long_form});
        CHECK(seen.size() == 15);
    }
}

TEST_CASE("cue words come from the gold long form at full cue strength") {
    SynthConfig cfg;
    cfg.num_acronyms = 4;
    cfg.sentences_per_long_form = 8;
    cfg.cue_strength = 1.0;
    cfg.seed = 7;
    SynthCorpus c = gen_synthetic(cfg);

    auto check_split = [&](const std::vector<SentenceSample>& split) {
        for (const auto& s : split) {
            std::set<std::string> gold_words;
            std::string word;
            for (char ch : *s.gold_long_form + " ") {
                if (ch == ' ') {
                    gold_words.insert(word);
                    word.clear();
                } else {
                    word.push_back(ch);
                }
            }
            bool has_cue = false;
            for (std::size_t i = 0; i < s.tokens.size(); ++i)
                if (i != s.acronym_index && gold_words.count(s.tokens[i])) has_cue = true;
            CHECK(has_cue);
        }
    };
    check_split(c.train);
    check_split(c.dev);
    check_split(c.test);
}

TEST_CASE("synth config validation") {
    SynthConfig cfg;
    cfg.min_long_forms = 1;
    cfg.max_long_forms = 1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SynthConfig{};
    cfg.train_fraction = 0.9;  // fractions no longer sum to one
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SynthConfig{};
    cfg.cue_strength = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
