#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ad/corpus.hpp"
#include "ad/model.hpp"

namespace ad {

struct PredictionRecord {
    std::string sample_id;
    std::string predicted_long_form;
    std::map<std::string, double> scores;  // candidate -> probability
};

struct ClassMetrics {
    std::string label;
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;  // sorted by label
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;  // harmonic mean of the macro P and R
    std::size_t n_classes = 0;
};

// Candidate predictor surface shared by the trained model and the MF
// baseline: given a sample, a probability per candidate long form.
using CandidateScorer =
    std::function<std::map<std::string, double>(const SentenceSample&, const std::vector<std::string>&)>;

// One forward pass per candidate; argmax, ties broken by lowest dictionary
// index.
PredictionRecord predict(const CandidateScorer& scorer, const SentenceSample& sample,
                         const Dictionary& dict);

CandidateScorer model_scorer(DualModel& model);

// Most-frequent baseline: per-acronym gold-frequency table over the training
// samples; ties and unseen acronyms fall back to the lowest dictionary index.
// Scores are Laplace-smoothed frequencies so they sit strictly inside (0,1).
CandidateScorer mf_baseline(const std::vector<SentenceSample>& train, const Dictionary& dict);

// Macro metrics over the union of gold and predicted labels (or over
// `class_set` when given). Per-class quotients with zero denominators are 0;
// macro F1 is computed from macro P and macro R, not per-class F1s.
MetricsReport macro_metrics(const std::vector<std::string>& gold,
                            const std::vector<std::string>& pred,
                            const std::optional<std::vector<std::string>>& class_set = std::nullopt);

struct EvalResult {
    MetricsReport report;
    std::vector<PredictionRecord> records;  // input order
};

// predict() over all samples (requires gold labels), then macro_metrics.
// `threads` > 1 parallelizes over samples; output order is unaffected.
EvalResult evaluate(const CandidateScorer& scorer, const std::vector<SentenceSample>& samples,
                    const Dictionary& dict, std::size_t threads = 1);

std::string report_to_json(const MetricsReport& report);
std::string predictions_to_json(const std::vector<PredictionRecord>& records);

}  // namespace ad
