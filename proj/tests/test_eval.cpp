#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ad/eval.hpp"
#include "ad/rng.hpp"
#include "doctest.h"

using namespace ad;

namespace {

Dictionary tiny_dict() {
    Dictionary d;
    d.add("CNN", {"convolutional neural network", "cable news network"});
    d.add("SVM", {"support vector machine", "state vector machine"});
    return d;
}

SentenceSample sample(std::string id, std::string acr, std::string gold) {
    SentenceSample s;
    s.id = std::move(id);
    s.tokens = {"uses", std::move(acr), "today"};
    s.acronym_index = 1;
    s.gold_long_form = std::move(gold);
    return s;
}

// Independent brute-force macro metrics for the fuzz comparison.
MetricsReport brute_force_macro(const std::vector<std::string>& gold,
                                const std::vector<std::string>& pred) {
    std::set<std::string> classes(gold.begin(), gold.end());
    classes.insert(pred.begin(), pred.end());
    double p_sum = 0.0, r_sum = 0.0;
    for (const auto& c : classes) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (pred[i] == c && gold[i] == c) ++tp;
            if (pred[i] == c && gold[i] != c) ++fp;
            if (pred[i] != c && gold[i] == c) ++fn;
        }
        p_sum += tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
        r_sum += tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
    }
    MetricsReport r;
    r.n_classes = classes.size();
    r.macro_precision = p_sum / classes.size();
    r.macro_recall = r_sum / classes.size();
    r.macro_f1 = r.macro_precision + r.macro_recall > 0
                     ? 2 * r.macro_precision * r.macro_recall / (r.macro_precision + r.macro_recall)
                     : 0.0;
    return r;
}

}  // namespace

TEST_CASE("macro metrics on a hand-worked example") {
    // classes: a (2 gold), b (1 gold), c (1 gold, never predicted)
    std::vector<std::string> gold = {"a", "a", "b", "c"};
    std::vector<std::string> pred = {"a", "b", "b", "a"};
    MetricsReport r = macro_metrics(gold, pred);
    // a: tp1 fp1 fn1 -> P .5 R .5 ; b: tp1 fp1 fn0 -> P .5 R 1 ; c: 0,0
    CHECK(r.n_classes == 3);
    CHECK(r.macro_precision == doctest::Approx(1.0 / 3.0));
    CHECK(r.macro_recall == doctest::Approx(0.5));
    CHECK(r.macro_f1 == doctest::Approx(2.0 * (1.0 / 3.0) * 0.5 / (1.0 / 3.0 + 0.5)));
}

TEST_CASE("perfect predictions give all ones") {
    std::vector<std::string> gold = {"x", "y", "z"};
    MetricsReport r = macro_metrics(gold, gold);
    CHECK(r.macro_precision == doctest::Approx(1.0));
    CHECK(r.macro_recall == doctest::Approx(1.0));
    CHECK(r.macro_f1 == doctest::Approx(1.0));
}

TEST_CASE("explicit class set restricts the average") {
    std::vector<std::string> gold = {"a", "b"};
    std::vector<std::string> pred = {"a", "c"};
    MetricsReport with_union = macro_metrics(gold, pred);
    CHECK(with_union.n_classes == 3);
    MetricsReport restricted = macro_metrics(gold, pred, std::vector<std::string>{"a", "b"});
    CHECK(restricted.n_classes == 2);
    CHECK(restricted.macro_precision == doctest::Approx(0.5));  // a: 1, b: 0
}

TEST_CASE("macro metrics validation") {
    CHECK_THROWS_AS(macro_metrics({"a"}, {}), ValidationError);
    CHECK_THROWS_AS(macro_metrics({}, {}), ValidationError);
}

TEST_CASE("macro metrics agree with brute force on fuzzed lists") {
    RngStream rng(47);
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t n_classes = 1 + rng.below(20);
        const std::size_t n = 1 + rng.below(200);
        std::vector<std::string> gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = "c" + std::to_string(rng.below(n_classes));
            pred[i] = "c" + std::to_string(rng.below(n_classes));
        }
        MetricsReport a = macro_metrics(gold, pred);
        MetricsReport b = brute_force_macro(gold, pred);
        CHECK(a.n_classes == b.n_classes);
        CHECK(std::abs(a.macro_precision - b.macro_precision) < 1e-12);
        CHECK(std::abs(a.macro_recall - b.macro_recall) < 1e-12);
        CHECK(std::abs(a.macro_f1 - b.macro_f1) < 1e-12);
        // harmonic identity
        if (a.macro_precision + a.macro_recall > 0)
            CHECK(a.macro_f1 == doctest::Approx(2 * a.macro_precision * a.macro_recall /
                                                (a.macro_precision + a.macro_recall))
                                    .epsilon(1e-12));
    }
}

TEST_CASE("predict takes the argmax with lowest-index tie break") {
    Dictionary d = tiny_dict();
    SentenceSample s = sample("s0", "CNN", "cable news network");

    CandidateScorer tie = [](const SentenceSample&, const std::vector<std::string>& cands) {
        std::map<std::string, double> scores;
        for (const auto& c : cands) scores[c] = 0.5;
        return scores;
    };
    CHECK(predict(tie, s, d).predicted_long_form == "convolutional neural network");

    CandidateScorer second = [](const SentenceSample&, const std::vector<std::string>& cands) {
        std::map<std::string, double> scores;
        for (std::size_t i = 0; i < cands.size(); ++i) scores[cands[i]] = static_cast<double>(i);
        return scores;
    };
    CHECK(predict(second, s, d).predicted_long_form == "cable news network");
}

TEST_CASE("mf baseline predicts the most frequent gold per acronym") {
    Dictionary d = tiny_dict();
    std::vector<SentenceSample> train = {
        sample("t0", "CNN", "cable news network"),
        sample("t1", "CNN", "cable news network"),
        sample("t2", "CNN", "convolutional neural network"),
        sample("t3", "SVM", "state vector machine"),
    };
    CandidateScorer mf = mf_baseline(train, d);

    CHECK(predict(mf, sample("q0", "CNN", "cable news network"), d).predicted_long_form ==
          "cable news network");
    CHECK(predict(mf, sample("q1", "SVM", "support vector machine"), d).predicted_long_form ==
          "state vector machine");

    // all scores are Laplace-smoothed probabilities strictly inside (0,1)
    auto scores = mf(sample("q2", "CNN", "cable news network"), d.candidates("CNN"));
    double total = 0.0;
    for (const auto& [c, p] : scores) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        total += p;
    }
    CHECK(total < 1.0 + 1e-12);
}

TEST_CASE("mf baseline falls back to dictionary order for unseen acronyms") {
    Dictionary d = tiny_dict();
    std::vector<SentenceSample> train = {sample("t0", "CNN", "cable news network")};
    CandidateScorer mf = mf_baseline(train, d);
    CHECK(predict(mf, sample("q0", "SVM", "state vector machine"), d).predicted_long_form ==
          "support vector machine");
}

TEST_CASE("evaluate is order preserving and thread count invariant") {
    Dictionary d = tiny_dict();
    std::vector<SentenceSample> samples;
    RngStream rng(3);
    for (int i = 0; i < 37; ++i) {
        const bool cnn = rng.bernoulli(0.5);
        const auto& cands = d.candidates(cnn ? "CNN" : "SVM");
        samples.push_back(
            sample("s" + std::to_string(i), cnn ? "CNN" : "SVM", cands[rng.below(2)]));
    }
    CandidateScorer scorer = [](const SentenceSample& s, const std::vector<std::string>& cands) {
        std::map<std::string, double> scores;
        for (std::size_t i = 0; i < cands.size(); ++i)
            scores[cands[i]] = 1.0 / (1.0 + static_cast<double>((s.id.size() + i) % 3));
        return scores;
    };
    EvalResult seq = evaluate(scorer, samples, d, 1);
    EvalResult par = evaluate(scorer, samples, d, 4);
    REQUIRE(seq.records.size() == par.records.size());
    for (std::size_t i = 0; i < seq.records.size(); ++i) {
        CHECK(seq.records[i].sample_id == samples[i].id);
        CHECK(seq.records[i].predicted_long_form == par.records[i].predicted_long_form);
    }
    CHECK(seq.report.macro_f1 == doctest::Approx(par.report.macro_f1).epsilon(1e-15));
}

TEST_CASE("json outputs contain the headline numbers") {
    std::vector<std::string> gold = {"a", "b"};
    MetricsReport r = macro_metrics(gold, gold);
    const std::string j = report_to_json(r);
    CHECK(j.find("\"macro_f1\": 1.0") != std::string::npos);
    CHECK(j.find("\"per_class\"") != std::string::npos);

    PredictionRecord rec;
    rec.sample_id = "s0";
    rec.predicted_long_form = "a";
    rec.scores = {{"a", 0.75}, {"b", 0.25}};
    const std::string p = predictions_to_json({rec});
    CHECK(p.find("\"id\": \"s0\"") != std::string::npos);
    CHECK(p.find("\"prediction\": \"a\"") != std::string::npos);
    CHECK(p.find("0.75") != std::string::npos);
}
