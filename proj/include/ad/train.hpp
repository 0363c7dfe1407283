#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ad/model.hpp"
#include "ad/params.hpp"

namespace ad {

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    std::size_t epochs = 1;
    std::size_t batch_size = 32;
    double lambda = 1e-4;
    std::uint64_t seed = 0;
    bool shuffle = true;
    std::size_t eval_every = 50;  // train-loss record interval, in steps

    void validate() const {
        if (learning_rate <= 0.0) throw ValidationError("train config: learning_rate must be positive");
        if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
        if (batch_size < 1) throw ValidationError("train config: batch_size must be >= 1");
        if (lambda < 0.0) throw ValidationError("train config: lambda must be >= 0");
    }
};

struct LossRecord {
    std::size_t epoch = 0;
    std::size_t step = 0;
    std::string split;  // "train" or "dev"
    double loss = 0.0;  // mean per pair
};

struct LossHistory {
    std::vector<LossRecord> records;
    std::string to_csv() const;  // header "epoch,step,split,loss"
};

// Adam first/second moment state (bias-corrected); empty for SGD.
struct OptimizerState {
    std::size_t step_count = 0;
    std::unordered_map<std::string, Tensor> m;
    std::unordered_map<std::string, Tensor> v;
};

// One update from the gradients currently in `params`. SGD: p -= lr*g.
// Adam: beta1=0.9, beta2=0.999, eps=1e-8 with bias correction.
void optimizer_step(ParamSet& params, OptimizerState& state, const TrainConfig& cfg);

struct TrainResult {
    LossHistory history;
    double final_train_loss = 0.0;     // mean per pair, last epoch
    double best_dev_loss = 0.0;        // mean per pair; 0 when no dev set
    std::size_t best_dev_epoch = 0;
    std::vector<Tensor> best_params;   // snapshot at best dev loss (entry order)
};

// Epochs x batches of forward/backward/step. Fully reproducible from
// cfg.seed (shuffling and dropout streams). Dev loss recorded per epoch when
// a dev set is supplied. Non-finite loss aborts with a diagnostic.
TrainResult train(DualModel& model, const std::vector<PairExample>& train_pairs,
                  const std::vector<PairExample>& dev_pairs, const TrainConfig& cfg);

// Max relative FD error over a seeded sample of up to `sample_per_group`
// coordinates per parameter group. `step` is the central-difference step.
struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t coords_checked = 0;
};

// `threads` > 1 shards the finite-difference probes over worker copies of the
// model; the report is identical for any thread count.
GradCheckReport grad_check(DualModel& model, const std::vector<PairExample>& pairs,
                           const std::vector<std::size_t>& indices, double step,
                           std::size_t sample_per_group = 1000, std::uint64_t seed = 0,
                           std::size_t threads = 1);

// Fraction of pairs whose eval-mode probability lands on the right side of
// 0.5.
double pair_accuracy(DualModel& model, const std::vector<PairExample>& pairs);

}  // namespace ad
