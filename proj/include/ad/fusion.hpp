#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ad/autograd.hpp"
#include "ad/errors.hpp"
#include "ad/params.hpp"

namespace ad {

enum class RegularizeSet { AllParams, WeightsOnly };

struct FusionConfig {
    std::size_t input_dim = 0;  // hidden_A + hidden_B (or one of them in single-path mode)
    std::array<std::size_t, 3> mlp_dims = {128, 64, 32};
    double dropout_prob = 0.1;
    double lambda = 1e-4;
    RegularizeSet regularize_set = RegularizeSet::WeightsOnly;

    void validate() const {
        if (input_dim == 0) throw ValidationError("fusion config: input_dim must be positive");
        for (std::size_t d : mlp_dims)
            if (d == 0) throw ValidationError("fusion config: mlp widths must be positive");
        if (lambda < 0.0) throw ValidationError("fusion config: lambda must be >= 0");
        if (dropout_prob < 0.0 || dropout_prob >= 1.0)
            throw ValidationError("fusion config: dropout_prob must be in [0,1)");
    }
};

// Three gelu MLP layers plus the separate sigmoid regression layer.
void init_fusion(ParamSet& params, const std::string& prefix, const FusionConfig& cfg,
                 std::uint64_t seed, double initializer_range = 0.02);

// Concatenation, path A first.
Var fuse(Tape& tape, Var h_a, Var h_b);
std::vector<double> fuse(const std::vector<double>& h_a, const std::vector<double>& h_b);

// p = sigmoid(W^T MLP(h) + b), strictly inside (0,1). Graph form returns a
// [1] node; the plain form runs a throwaway tape.
Var head_forward(Tape& tape, ParamSet& params, const std::string& prefix, const FusionConfig& cfg,
                 Var h, bool train_mode, RngStream& rng);
double head_forward(ParamSet& params, const std::string& prefix, const FusionConfig& cfg,
                    const std::vector<double>& h, bool train_mode, RngStream& rng);

// Summed binary cross entropy plus lambda * ||theta||^2 over the regularized
// set. Probabilities are clamped to [1e-12, 1-1e-12] before the logs.
double loss(const std::vector<double>& probs, const std::vector<int>& labels,
            const ParamSet& params, double lambda,
            RegularizeSet reg_set = RegularizeSet::WeightsOnly);

double l2_penalty(const ParamSet& params, double lambda, RegularizeSet reg_set);

}  // namespace ad
