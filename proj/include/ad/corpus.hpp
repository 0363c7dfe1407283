#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ad/errors.hpp"

namespace ad {

// Acronym -> ordered candidate long forms. Candidate order is the file
// order and drives tie-breaking everywhere downstream.
class Dictionary {
  public:
    void add(const std::string& acronym, std::vector<std::string> long_forms);

    bool has(const std::string& acronym) const { return index_.count(acronym) != 0; }
    const std::vector<std::string>& candidates(const std::string& acronym) const;
    // Index of a candidate within its acronym's list, -1 if absent.
    int candidate_index(const std::string& acronym, const std::string& long_form) const;

    const std::vector<std::string>& acronyms() const { return order_; }
    std::size_t size() const { return order_.size(); }

  private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, std::vector<std::string>> index_;
};

struct SentenceSample {
    std::string id;
    std::vector<std::string> tokens;
    std::size_t acronym_index = 0;
    std::optional<std::string> gold_long_form;
};

struct PairExample {
    std::string sample_id;
    std::vector<std::string> tokens;
    std::size_t acronym_index = 0;
    std::string candidate_long_form;
    int label = 0;  // 1 iff candidate equals the sample's gold long form
};

struct CorpusStats {
    std::size_t num_acronyms = 0;           // dictionary entries (primary figure)
    std::size_t num_acronyms_attested = 0;  // acronyms appearing in sample slots
    double avg_long_forms_per_acronym = 0.0;
    double avg_sentence_length = 0.0;
    double overlap_ratio = 0.0;
    std::map<std::string, std::size_t> split_sizes;
};

struct SynthConfig {
    std::size_t num_acronyms = 50;
    std::size_t min_long_forms = 3;
    std::size_t max_long_forms = 3;
    std::size_t sentences_per_long_form = 30;
    double cue_strength = 0.9;
    double train_fraction = 0.8;
    double dev_fraction = 0.1;
    double test_fraction = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthCorpus {
    Dictionary dict;
    std::vector<SentenceSample> train;
    std::vector<SentenceSample> dev;
    std::vector<SentenceSample> test;
};

enum class UpsampleMode {
    None,      // k pairs per sample
    Full,      // positive replicated to k copies: 2k-1 pairs
    Balanced,  // positive replicated to k-1 copies: 2k-2 pairs (k>1)
};

// Optional renaming of source fields to the canonical sample schema
// (canonical name -> source name).
using FieldAdapter = std::map<std::string, std::string>;

Dictionary load_dictionary(const std::string& content);
std::string serialize_dictionary(const Dictionary& dict);

std::vector<SentenceSample> load_samples(const std::string& content, const Dictionary& dict,
                                         bool require_gold, const FieldAdapter& adapter = {});
std::string serialize_samples(const std::vector<SentenceSample>& samples);

std::vector<PairExample> build_pairs(const std::vector<SentenceSample>& samples,
                                     const Dictionary& dict, UpsampleMode mode);
std::string serialize_pairs(const std::vector<PairExample>& pairs);

CorpusStats compute_stats(const std::vector<SentenceSample>& samples, const Dictionary& dict);

SynthCorpus gen_synthetic(const SynthConfig& cfg);

}  // namespace ad
