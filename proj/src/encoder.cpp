#include "ad/encoder.hpp"

namespace ad {

namespace {

Tensor normal_init(std::vector<std::size_t> shape, double stddev, RngStream& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = stddev * rng.normal();
    return t;
}

Tensor ones(std::vector<std::size_t> shape) {
    Tensor t(std::move(shape));
    std::fill(t.data.begin(), t.data.end(), 1.0);
    return t;
}

}  // namespace

void init_encoder(ParamSet& params, const std::string& prefix, const EncoderConfig& cfg,
                  std::uint64_t seed) {
    cfg.validate();
    RngStream rng(derive_seed(seed, "init_encoder/" + prefix));
    const std::size_t h = cfg.hidden_size;
    const double sd = cfg.initializer_range;

    params.add(prefix + ".tok.emb", normal_init({cfg.vocab_size, h}, sd, rng));
    params.add(prefix + ".pos.emb", normal_init({cfg.max_position_embeddings, h}, sd, rng));
    for (std::size_t l = 0; l < cfg.num_hidden_layers; ++l) {
        const std::string lp = prefix + ".layer" + std::to_string(l);
        for (const char* proj : {".attn.q", ".attn.k", ".attn.v", ".attn.o"}) {
            params.add(lp + proj + ".weight", normal_init({h, h}, sd, rng));
            params.add(lp + proj + ".bias", Tensor::zeros({h}));
        }
        params.add(lp + ".ln1.gain", ones({h}));
        params.add(lp + ".ln1.bias", Tensor::zeros({h}));
        params.add(lp + ".ffn.w1.weight", normal_init({cfg.intermediate_size, h}, sd, rng));
        params.add(lp + ".ffn.w1.bias", Tensor::zeros({cfg.intermediate_size}));
        params.add(lp + ".ffn.w2.weight", normal_init({h, cfg.intermediate_size}, sd, rng));
        params.add(lp + ".ffn.w2.bias", Tensor::zeros({h}));
        params.add(lp + ".ln2.gain", ones({h}));
        params.add(lp + ".ln2.bias", Tensor::zeros({h}));
    }
    params.add(prefix + ".pooler.weight", normal_init({h, h}, sd, rng));
    params.add(prefix + ".pooler.bias", Tensor::zeros({h}));
}

Var encode(Tape& tape, ParamSet& params, const std::string& prefix, const EncoderConfig& cfg,
           const TokenSequence& seq, bool train_mode, RngStream& rng) {
    if (seq.length() > cfg.max_position_embeddings)
        throw ValidationError("encode: sequence length " + std::to_string(seq.length()) +
                              " exceeds max_position_embeddings");
    if (seq.empty()) throw ValidationError("encode: empty token sequence");
    for (int id : seq.ids)
        if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size)
            throw ValidationError("encode: token id out of range for vocabulary");

    auto p = [&](const std::string& name) { return tape.param(params, prefix + name); };

    std::vector<int> positions(seq.length());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);

    Var x = add(tape, gather_rows(tape, p(".tok.emb"), seq.ids),
                gather_rows(tape, p(".pos.emb"), positions));

    for (std::size_t l = 0; l < cfg.num_hidden_layers; ++l) {
        const std::string lp = ".layer" + std::to_string(l);
        // self-attention sublayer, residual + post layer norm
        Var q = add_rowvec(tape, matmul_nt(tape, x, p(lp + ".attn.q.weight")), p(lp + ".attn.q.bias"));
        Var k = add_rowvec(tape, matmul_nt(tape, x, p(lp + ".attn.k.weight")), p(lp + ".attn.k.bias"));
        Var v = add_rowvec(tape, matmul_nt(tape, x, p(lp + ".attn.v.weight")), p(lp + ".attn.v.bias"));
        Var attn = multi_head_self_attention(tape, q, k, v, cfg.num_attention_heads,
                                             cfg.attention_probs_dropout_prob, rng, train_mode);
        Var attn_out = add_rowvec(tape, matmul_nt(tape, attn, p(lp + ".attn.o.weight")),
                                  p(lp + ".attn.o.bias"));
        attn_out = dropout(tape, attn_out, cfg.hidden_dropout_prob, rng, train_mode);
        x = layer_norm(tape, add(tape, x, attn_out), p(lp + ".ln1.gain"), p(lp + ".ln1.bias"),
                       cfg.layer_norm_eps);

        // feed-forward sublayer, residual + post layer norm
        Var ff = add_rowvec(tape, matmul_nt(tape, x, p(lp + ".ffn.w1.weight")), p(lp + ".ffn.w1.bias"));
        ff = gelu(tape, ff);
        ff = add_rowvec(tape, matmul_nt(tape, ff, p(lp + ".ffn.w2.weight")), p(lp + ".ffn.w2.bias"));
        ff = dropout(tape, ff, cfg.hidden_dropout_prob, rng, train_mode);
        x = layer_norm(tape, add(tape, x, ff), p(lp + ".ln2.gain"), p(lp + ".ln2.bias"),
                       cfg.layer_norm_eps);
    }

    Var cls = select_row(tape, x, 0);
    Var pooled = add_rowvec(tape, matmul_nt(tape, cls, p(".pooler.weight")), p(".pooler.bias"));
    return tanh_op(tape, pooled);
}

}  // namespace ad
