#include "ad/eval.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <thread>

#include "json.hpp"

namespace ad {

using ordered_json = nlohmann::ordered_json;

PredictionRecord predict(const CandidateScorer& scorer, const SentenceSample& sample,
                         const Dictionary& dict) {
    const std::string& acr = sample.tokens[sample.acronym_index];
    const auto& cands = dict.candidates(acr);  // throws on unknown acronym
    PredictionRecord rec;
    rec.sample_id = sample.id;
    rec.scores = scorer(sample, cands);
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const double p = rec.scores.at(cands[i]);
        if (p > best_p) {  // strict: ties keep the lowest dictionary index
            best_p = p;
            best = i;
        }
    }
    rec.predicted_long_form = cands[best];
    return rec;
}

CandidateScorer model_scorer(DualModel& model) {
    return [&model](const SentenceSample& sample, const std::vector<std::string>& cands) {
        std::map<std::string, double> scores;
        for (const auto& cand : cands) {
            PairExample pair;
            pair.sample_id = sample.id;
            pair.tokens = sample.tokens;
            pair.acronym_index = sample.acronym_index;
            pair.candidate_long_form = cand;
            scores[cand] = model.predict_prob(pair);
        }
        return scores;
    };
}

CandidateScorer mf_baseline(const std::vector<SentenceSample>& train, const Dictionary& dict) {
    auto counts = std::make_shared<std::map<std::string, std::map<std::string, std::size_t>>>();
    for (const auto& s : train) {
        if (!s.gold_long_form)
            throw ValidationError("mf_baseline: training sample '" + s.id + "' has no gold long form");
        ++(*counts)[s.tokens[s.acronym_index]][*s.gold_long_form];
    }
    return [counts](const SentenceSample& sample, const std::vector<std::string>& cands) {
        const std::string& acr = sample.tokens[sample.acronym_index];
        std::map<std::string, double> scores;
        auto it = counts->find(acr);
        double total = 0.0;
        for (const auto& cand : cands) {
            double c = 0.0;
            if (it != counts->end()) {
                auto cit = it->second.find(cand);
                if (cit != it->second.end()) c = static_cast<double>(cit->second);
            }
            scores[cand] = c;
            total += c;
        }
        // Laplace smoothing keeps scores strictly inside (0,1) while
        // preserving the count argmax (and the dictionary-order fallback).
        for (const auto& cand : cands)
            scores[cand] = (scores[cand] + 1.0) / (total + static_cast<double>(cands.size()) + 1.0);
        return scores;
    };
}

MetricsReport macro_metrics(const std::vector<std::string>& gold,
                            const std::vector<std::string>& pred,
                            const std::optional<std::vector<std::string>>& class_set) {
    if (gold.size() != pred.size()) throw ValidationError("macro_metrics: gold/pred length mismatch");
    if (gold.empty()) throw ValidationError("macro_metrics: empty label lists");

    std::set<std::string> classes;
    if (class_set) classes.insert(class_set->begin(), class_set->end());
    else {
        classes.insert(gold.begin(), gold.end());
        classes.insert(pred.begin(), pred.end());
    }

    std::map<std::string, ClassMetrics> by_class;
    for (const auto& c : classes) by_class[c].label = c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == pred[i]) {
            auto it = by_class.find(gold[i]);
            if (it != by_class.end()) ++it->second.tp;
        } else {
            auto g = by_class.find(gold[i]);
            if (g != by_class.end()) ++g->second.fn;
            auto p = by_class.find(pred[i]);
            if (p != by_class.end()) ++p->second.fp;
        }
    }

    MetricsReport report;
    double p_sum = 0.0, r_sum = 0.0;
    for (auto& [label, cm] : by_class) {
        cm.precision = cm.tp + cm.fp > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp) : 0.0;
        cm.recall = cm.tp + cm.fn > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn) : 0.0;
        cm.f1 = cm.precision + cm.recall > 0.0
                    ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                    : 0.0;
        p_sum += cm.precision;
        r_sum += cm.recall;
        report.per_class.push_back(cm);
    }
    report.n_classes = report.per_class.size();
    if (report.n_classes == 0) throw ValidationError("macro_metrics: empty class set");
    report.macro_precision = p_sum / static_cast<double>(report.n_classes);
    report.macro_recall = r_sum / static_cast<double>(report.n_classes);
    report.macro_f1 = report.macro_precision + report.macro_recall > 0.0
                          ? 2.0 * report.macro_precision * report.macro_recall /
                                (report.macro_precision + report.macro_recall)
                          : 0.0;
    return report;
}

EvalResult evaluate(const CandidateScorer& scorer, const std::vector<SentenceSample>& samples,
                    const Dictionary& dict, std::size_t threads) {
    EvalResult result;
    result.records.resize(samples.size());
    std::vector<std::string> gold(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].gold_long_form)
            throw ValidationError("evaluate: sample '" + samples[i].id + "' has no gold long form");
        gold[i] = *samples[i].gold_long_form;
    }

    auto worker = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < samples.size(); i += stride)
            result.records[i] = predict(scorer, samples[i], dict);
    };
    if (threads <= 1 || samples.size() < 2) {
        worker(0, 1);
    } else {
        const std::size_t n = std::min(threads, samples.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker, t, n);
        for (auto& th : pool) th.join();
    }

    std::vector<std::string> pred(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) pred[i] = result.records[i].predicted_long_form;
    result.report = macro_metrics(gold, pred);
    return result;
}

std::string report_to_json(const MetricsReport& report) {
    ordered_json j = ordered_json::object();
    j["macro_precision"] = report.macro_precision;
    j["macro_recall"] = report.macro_recall;
    j["macro_f1"] = report.macro_f1;
    j["n_classes"] = report.n_classes;
    ordered_json per = ordered_json::array();
    for (const auto& cm : report.per_class) {
        ordered_json c = ordered_json::object();
        c["label"] = cm.label;
        c["precision"] = cm.precision;
        c["recall"] = cm.recall;
        c["f1"] = cm.f1;
        c["tp"] = cm.tp;
        c["fp"] = cm.fp;
        c["fn"] = cm.fn;
        per.push_back(std::move(c));
    }
    j["per_class"] = std::move(per);
    return j.dump(2) + "\n";
}

std::string predictions_to_json(const std::vector<PredictionRecord>& records) {
    ordered_json j = ordered_json::array();
    for (const auto& r : records) {
        ordered_json rec = ordered_json::object();
        rec["id"] = r.sample_id;
        rec["prediction"] = r.predicted_long_form;
        ordered_json scores = ordered_json::object();
        for (const auto& [cand, p] : r.scores) scores[cand] = p;
        rec["scores"] = std::move(scores);
        j.push_back(std::move(rec));
    }
    return j.dump(2) + "\n";
}

}  // namespace ad
