#pragma once

#include <cstdint>
#include <string>

#include "ad/autograd.hpp"
#include "ad/errors.hpp"
#include "ad/params.hpp"
#include "ad/token_sequence.hpp"

namespace ad {

struct EncoderConfig {
    std::size_t vocab_size = 0;
    std::size_t hidden_size = 64;
    std::size_t num_hidden_layers = 2;
    std::size_t num_attention_heads = 4;
    std::size_t intermediate_size = 256;
    std::string hidden_act = "gelu";
    double hidden_dropout_prob = 0.1;
    double attention_probs_dropout_prob = 0.1;
    std::size_t max_position_embeddings = 128;
    double layer_norm_eps = 1e-5;
    double initializer_range = 0.02;
    std::string position_embedding_type = "absolute";

    void validate() const {
        if (hidden_size == 0 || num_attention_heads == 0 || hidden_size % num_attention_heads != 0)
            throw ValidationError("encoder config: hidden_size must be a positive multiple of num_attention_heads");
        if (hidden_dropout_prob < 0.0 || hidden_dropout_prob >= 1.0 ||
            attention_probs_dropout_prob < 0.0 || attention_probs_dropout_prob >= 1.0)
            throw ValidationError("encoder config: dropout probabilities must be in [0,1)");
        if (layer_norm_eps <= 0.0) throw ValidationError("encoder config: layer_norm_eps must be positive");
        if (hidden_act != "gelu") throw ValidationError("encoder config: unsupported hidden_act");
        if (position_embedding_type != "absolute")
            throw ValidationError("encoder config: unsupported position_embedding_type");
        if (vocab_size == 0 || num_hidden_layers == 0 || intermediate_size == 0 || max_position_embeddings == 0)
            throw ValidationError("encoder config: sizes must be positive");
    }
};

// Adds one encoder's parameters under `prefix.` to the ParamSet. Weight
// matrices and embeddings are drawn normal(0, initializer_range); biases
// start at zero, layer-norm gains at one.
void init_encoder(ParamSet& params, const std::string& prefix, const EncoderConfig& cfg,
                  std::uint64_t seed);

// Forward pass for one token sequence: token + absolute position embeddings,
// then post-norm transformer layers, pooled as the CLS-position state through
// a tanh linear layer. Returns a [1, hidden_size] node on the tape.
Var encode(Tape& tape, ParamSet& params, const std::string& prefix, const EncoderConfig& cfg,
           const TokenSequence& seq, bool train_mode, RngStream& rng);

}  // namespace ad
