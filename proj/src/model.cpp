#include "ad/model.hpp"

#include <cmath>

namespace ad {

std::string path_mode_name(PathMode m) {
    switch (m) {
        case PathMode::Dual: return "dual";
        case PathMode::PathA: return "a";
        case PathMode::PathB: return "b";
    }
    return "?";
}

PathMode path_mode_from_name(const std::string& name) {
    if (name == "dual") return PathMode::Dual;
    if (name == "a") return PathMode::PathA;
    if (name == "b") return PathMode::PathB;
    throw ValidationError("unknown path mode '" + name + "' (expected dual, a, or b)");
}

DualModel DualModel::create(ModelConfig cfg, BpeVocab bpe, WordPieceVocab wp, std::uint64_t seed) {
    cfg.enc_a.vocab_size = static_cast<std::size_t>(bpe.vocab_size());
    cfg.enc_b.vocab_size = static_cast<std::size_t>(wp.vocab_size());
    switch (cfg.paths) {
        case PathMode::Dual: cfg.fusion.input_dim = cfg.enc_a.hidden_size + cfg.enc_b.hidden_size; break;
        case PathMode::PathA: cfg.fusion.input_dim = cfg.enc_a.hidden_size; break;
        case PathMode::PathB: cfg.fusion.input_dim = cfg.enc_b.hidden_size; break;
    }
    DualModel m;
    m.cfg_ = cfg;
    m.bpe_ = std::move(bpe);
    m.wp_ = std::move(wp);
    if (cfg.paths != PathMode::PathB) init_encoder(m.params_, "encA", cfg.enc_a, seed);
    if (cfg.paths != PathMode::PathA) init_encoder(m.params_, "encB", cfg.enc_b, seed);
    // the head inherits the init scale of the leading active encoder so one
    // config knob governs the whole model
    const double head_init = (cfg.paths != PathMode::PathB ? cfg.enc_a : cfg.enc_b).initializer_range;
    init_fusion(m.params_, "fusion", cfg.fusion, seed, head_init);
    return m;
}

DualModel DualModel::assemble(ModelConfig cfg, BpeVocab bpe, WordPieceVocab wp, ParamSet params) {
    DualModel m;
    m.cfg_ = std::move(cfg);
    m.bpe_ = std::move(bpe);
    m.wp_ = std::move(wp);
    m.params_ = std::move(params);
    return m;
}

Var DualModel::pair_prob(Tape& tape, const PairExample& pair, bool train_mode, RngStream& rng) {
    Var h = nullptr;
    if (cfg_.paths != PathMode::PathB) {
        TokenSequence seq = assemble_pair(bpe_builder(bpe_), pair.tokens, pair.acronym_index,
                                          pair.candidate_long_form, cfg_.max_len);
        h = encode(tape, params_, "encA", cfg_.enc_a, seq, train_mode, rng);
    }
    if (cfg_.paths != PathMode::PathA) {
        TokenSequence seq = assemble_pair(wp_builder(wp_), pair.tokens, pair.acronym_index,
                                          pair.candidate_long_form, cfg_.max_len);
        Var hb = encode(tape, params_, "encB", cfg_.enc_b, seq, train_mode, rng);
        h = h ? fuse(tape, h, hb) : hb;
    }
    return head_forward(tape, params_, "fusion", cfg_.fusion, h, train_mode, rng);
}

double DualModel::predict_prob(const PairExample& pair) {
    Tape tape;
    RngStream rng(0);  // unused in eval mode
    return pair_prob(tape, pair, false, rng)->value.data[0];
}

double batch_loss(DualModel& model, const std::vector<PairExample>& pairs,
                  const std::vector<std::size_t>& indices, std::uint64_t dropout_seed,
                  bool train_mode, bool accumulate_grads) {
    double total = 0.0;
    for (std::size_t idx : indices) {
        const PairExample& pair = pairs.at(idx);
        RngStream rng(derive_seed(dropout_seed, "dropout", idx));
        Tape tape;
        Var p = model.pair_prob(tape, pair, train_mode, rng);
        Var l = bce(tape, p, static_cast<double>(pair.label));
        total += l->value.data[0];
        if (accumulate_grads) {
            tape.backward(l);
            tape.accumulate_param_grads();
        }
    }
    const FusionConfig& fc = model.config().fusion;
    total += l2_penalty(model.params(), fc.lambda, fc.regularize_set);
    if (accumulate_grads && fc.lambda > 0.0) {
        for (auto& e : model.params().entries()) {
            if (fc.regularize_set == RegularizeSet::WeightsOnly && !is_regularized_weight(e.name))
                continue;
            for (std::size_t i = 0; i < e.value.size(); ++i)
                e.grad.data[i] += 2.0 * fc.lambda * e.value.data[i];
        }
    }
    if (!std::isfinite(total))
        throw std::runtime_error("batch_loss: non-finite loss (divergence)");
    return total;
}

}  // namespace ad
