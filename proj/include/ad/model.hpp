#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ad/assemble.hpp"
#include "ad/bpe.hpp"
#include "ad/corpus.hpp"
#include "ad/encoder.hpp"
#include "ad/fusion.hpp"
#include "ad/wordpiece.hpp"

namespace ad {

// Which encoder paths feed the head. Path A is the byte-level BPE encoder,
// path B the WordPiece encoder; Dual concatenates A then B.
enum class PathMode { Dual, PathA, PathB };

std::string path_mode_name(PathMode m);
PathMode path_mode_from_name(const std::string& name);

struct ModelConfig {
    EncoderConfig enc_a;
    EncoderConfig enc_b;
    FusionConfig fusion;  // input_dim derived from paths at creation
    PathMode paths = PathMode::Dual;
    std::size_t max_len = 64;
};

// The dual-path classifier: two subword vocabularies, the encoder stacks for
// the active paths, and the MLP+sigmoid head, all in one ParamSet.
class DualModel {
  public:
    static DualModel create(ModelConfig cfg, BpeVocab bpe, WordPieceVocab wp, std::uint64_t seed);

    // Probability node for one (sentence, candidate) pair. Dropout is driven
    // solely by `rng` and active only in train mode.
    Var pair_prob(Tape& tape, const PairExample& pair, bool train_mode, RngStream& rng);

    // Deterministic eval-mode probability.
    double predict_prob(const PairExample& pair);

    ModelConfig& config() { return cfg_; }
    const ModelConfig& config() const { return cfg_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    const BpeVocab& bpe() const { return bpe_; }
    const WordPieceVocab& wp() const { return wp_; }

    // Used by checkpoint loading: an empty model whose params are filled in
    // afterwards.
    static DualModel assemble(ModelConfig cfg, BpeVocab bpe, WordPieceVocab wp, ParamSet params);

  private:
    DualModel() = default;

    ModelConfig cfg_;
    BpeVocab bpe_;
    WordPieceVocab wp_;
    ParamSet params_;
};

// Batch loss per Eq-style summed cross entropy plus the L2 term. Examples are
// identified by their indices into `pairs`; each example's dropout stream is
// derived from (dropout_seed, index) so batch composition and parallelism
// cannot change results. Gradients are accumulated into the ParamSet when
// requested.
double batch_loss(DualModel& model, const std::vector<PairExample>& pairs,
                  const std::vector<std::size_t>& indices, std::uint64_t dropout_seed,
                  bool train_mode, bool accumulate_grads);

}  // namespace ad
