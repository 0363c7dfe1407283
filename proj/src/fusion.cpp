#include "ad/fusion.hpp"

#include <cmath>

namespace ad {

void init_fusion(ParamSet& params, const std::string& prefix, const FusionConfig& cfg,
                 std::uint64_t seed, double initializer_range) {
    cfg.validate();
    RngStream rng(derive_seed(seed, "init_fusion/" + prefix));
    auto normal_init = [&](std::vector<std::size_t> shape) {
        Tensor t(std::move(shape));
        for (double& v : t.data) v = initializer_range * rng.normal();
        return t;
    };
    std::size_t in = cfg.input_dim;
    for (std::size_t l = 0; l < cfg.mlp_dims.size(); ++l) {
        const std::string lp = prefix + ".mlp" + std::to_string(l);
        params.add(lp + ".weight", normal_init({cfg.mlp_dims[l], in}));
        params.add(lp + ".bias", Tensor::zeros({cfg.mlp_dims[l]}));
        in = cfg.mlp_dims[l];
    }
    params.add(prefix + ".out.weight", normal_init({1, in}));
    params.add(prefix + ".out.bias", Tensor::zeros({1}));
}

Var fuse(Tape& tape, Var h_a, Var h_b) { return concat_cols(tape, {h_a, h_b}); }

std::vector<double> fuse(const std::vector<double>& h_a, const std::vector<double>& h_b) {
    std::vector<double> out;
    out.reserve(h_a.size() + h_b.size());
    out.insert(out.end(), h_a.begin(), h_a.end());
    out.insert(out.end(), h_b.begin(), h_b.end());
    return out;
}

Var head_forward(Tape& tape, ParamSet& params, const std::string& prefix, const FusionConfig& cfg,
                 Var h, bool train_mode, RngStream& rng) {
    if (h->value.cols() != cfg.input_dim)
        throw ValidationError("head_forward: input dimension mismatch");
    Var x = h;
    for (std::size_t l = 0; l < cfg.mlp_dims.size(); ++l) {
        const std::string lp = prefix + ".mlp" + std::to_string(l);
        x = add_rowvec(tape, matmul_nt(tape, x, tape.param(params, lp + ".weight")),
                       tape.param(params, lp + ".bias"));
        x = gelu(tape, x);
        x = dropout(tape, x, cfg.dropout_prob, rng, train_mode);
    }
    Var logit = add_rowvec(tape, matmul_nt(tape, x, tape.param(params, prefix + ".out.weight")),
                           tape.param(params, prefix + ".out.bias"));
    return sigmoid(tape, logit);
}

double head_forward(ParamSet& params, const std::string& prefix, const FusionConfig& cfg,
                    const std::vector<double>& h, bool train_mode, RngStream& rng) {
    Tape tape;
    Tensor hv({1, h.size()});
    hv.data = h;
    Var p = head_forward(tape, params, prefix, cfg, tape.leaf(std::move(hv)), train_mode, rng);
    return p->value.data[0];
}

double l2_penalty(const ParamSet& params, double lambda, RegularizeSet reg_set) {
    if (lambda == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& e : params.entries()) {
        if (reg_set == RegularizeSet::WeightsOnly && !is_regularized_weight(e.name)) continue;
        for (double v : e.value.data) s += v * v;
    }
    return lambda * s;
}

double loss(const std::vector<double>& probs, const std::vector<int>& labels,
            const ParamSet& params, double lambda, RegularizeSet reg_set) {
    if (probs.size() != labels.size())
        throw ValidationError("loss: probs and labels length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw ValidationError("loss: probability outside [0,1]");
        const double p = std::min(1.0 - 1e-12, std::max(1e-12, probs[i]));
        const double y = static_cast<double>(labels[i]);
        total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return total + l2_penalty(params, lambda, reg_set);
}

}  // namespace ad
