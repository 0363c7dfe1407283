#include "ad/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include "ad/log.hpp"

namespace ad {

std::string LossHistory::to_csv() const {
    std::string out = "epoch,step,split,loss\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%s,%.17g\n", r.epoch, r.step, r.split.c_str(), r.loss);
        out += buf;
    }
    return out;
}

void optimizer_step(ParamSet& params, OptimizerState& state, const TrainConfig& cfg) {
    for (const auto& e : params.entries())
        for (double g : e.grad.data)
            if (!std::isfinite(g))
                throw std::runtime_error("optimizer_step: non-finite gradient in " + e.name);

    if (cfg.optimizer == OptimizerKind::Sgd) {
        for (auto& e : params.entries())
            for (std::size_t i = 0; i < e.value.size(); ++i)
                e.value.data[i] -= cfg.learning_rate * e.grad.data[i];
        return;
    }

    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++state.step_count;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step_count));
    for (auto& e : params.entries()) {
        Tensor& m = state.m.try_emplace(e.name, Tensor::zeros(e.value.shape)).first->second;
        Tensor& v = state.v.try_emplace(e.name, Tensor::zeros(e.value.shape)).first->second;
        for (std::size_t i = 0; i < e.value.size(); ++i) {
            const double g = e.grad.data[i];
            m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * g;
            v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * g * g;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            e.value.data[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

namespace {

double mean_eval_loss(DualModel& model, const std::vector<PairExample>& pairs) {
    if (pairs.empty()) return 0.0;
    std::vector<std::size_t> all(pairs.size());
    std::iota(all.begin(), all.end(), 0);
    // eval mode: no dropout, so the dropout seed is inert
    const double sum = batch_loss(model, pairs, all, 0, false, false);
    return sum / static_cast<double>(pairs.size());
}

}  // namespace

TrainResult train(DualModel& model, const std::vector<PairExample>& train_pairs,
                  const std::vector<PairExample>& dev_pairs, const TrainConfig& cfg) {
    cfg.validate();
    if (train_pairs.empty()) throw ValidationError("train: empty training pair list");
    model.config().fusion.lambda = cfg.lambda;

    TrainResult result;
    OptimizerState opt_state;
    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), 0);

    bool have_best = false;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            RngStream shuffle_rng(derive_seed(cfg.seed, "shuffle", epoch));
            for (std::size_t n = order.size(); n > 1; --n)
                std::swap(order[n - 1], order[shuffle_rng.below(n)]);
        }
        const std::uint64_t dropout_seed = derive_seed(cfg.seed, "dropout-epoch", epoch);
        double epoch_loss_sum = 0.0;
        std::size_t step = 0;
        for (std::size_t off = 0; off < order.size(); off += cfg.batch_size, ++step) {
            const std::size_t end = std::min(off + cfg.batch_size, order.size());
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(off),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
            model.params().zero_grads();
            const double loss_sum = batch_loss(model, train_pairs, batch, dropout_seed, true, true);
            optimizer_step(model.params(), opt_state, cfg);
            const double mean = loss_sum / static_cast<double>(batch.size());
            epoch_loss_sum += loss_sum;
            if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
                result.history.records.push_back({epoch, step, "train", mean});
                log_debug("epoch " + std::to_string(epoch) + " step " + std::to_string(step) +
                          " train loss " + std::to_string(mean));
            }
        }
        result.final_train_loss = epoch_loss_sum / static_cast<double>(train_pairs.size());
        if (!dev_pairs.empty()) {
            const double dev_loss = mean_eval_loss(model, dev_pairs);
            result.history.records.push_back({epoch, step, "dev", dev_loss});
            log_info("epoch " + std::to_string(epoch) + " dev loss " + std::to_string(dev_loss));
            if (!have_best || dev_loss < result.best_dev_loss) {
                have_best = true;
                result.best_dev_loss = dev_loss;
                result.best_dev_epoch = epoch;
                result.best_params.clear();
                for (const auto& e : model.params().entries()) result.best_params.push_back(e.value);
            }
        }
    }
    if (!have_best) {
        for (const auto& e : model.params().entries()) result.best_params.push_back(e.value);
    }
    return result;
}

GradCheckReport grad_check(DualModel& model, const std::vector<PairExample>& pairs,
                           const std::vector<std::size_t>& indices, double step,
                           std::size_t sample_per_group, std::uint64_t seed, std::size_t threads) {
    const std::uint64_t dropout_seed = derive_seed(seed, "gradcheck-dropout");
    model.params().zero_grads();
    const double base_loss = batch_loss(model, pairs, indices, dropout_seed, true, true);

    // Central differences cannot resolve gradients below eps*|L|/step; for
    // coordinates that small the quotient would measure roundoff, not the
    // backward pass. The denominator floor is raised to keep such noise a
    // factor below the 1e-4 agreement target (sign flips and scale errors on
    // real gradients are far above it either way).
    constexpr double kAgreementTarget = 1e-4;
    const double fd_resolution =
        std::numeric_limits<double>::epsilon() * std::abs(base_loss) / step;
    const double denom_floor = std::max(1e-8, 4.0 * fd_resolution / kAgreementTarget);
    std::vector<Tensor> analytic;
    analytic.reserve(model.params().entries().size());
    for (const auto& e : model.params().entries()) analytic.push_back(e.grad);

    auto& entries = model.params().entries();
    std::vector<std::pair<std::size_t, std::size_t>> probes;  // (group, coordinate)
    for (std::size_t gi = 0; gi < entries.size(); ++gi) {
        const auto& e = entries[gi];
        RngStream pick(derive_seed(seed, "gradcheck-sample", gi));
        if (e.value.size() <= sample_per_group) {
            for (std::size_t c = 0; c < e.value.size(); ++c) probes.emplace_back(gi, c);
        } else {
            std::unordered_map<std::size_t, bool> seen;
            std::size_t got = 0;
            while (got < sample_per_group) {
                const std::size_t c = pick.below(e.value.size());
                if (seen.emplace(c, true).second) {
                    probes.emplace_back(gi, c);
                    ++got;
                }
            }
        }
    }

    const std::size_t n_threads =
        std::max<std::size_t>(1, std::min(threads, probes.empty() ? 1 : probes.size()));
    std::vector<GradCheckReport> partial(n_threads);
    auto worker = [&](std::size_t ti) {
        DualModel local = model;  // probes mutate parameters, so each worker owns a copy
        auto& les = local.params().entries();
        GradCheckReport& rep = partial[ti];
        for (std::size_t p = ti; p < probes.size(); p += n_threads) {
            const auto [gi, c] = probes[p];
            auto& e = les[gi];
            const double saved = e.value.data[c];
            e.value.data[c] = saved + step;
            const double lp = batch_loss(local, pairs, indices, dropout_seed, true, false);
            e.value.data[c] = saved - step;
            const double lm = batch_loss(local, pairs, indices, dropout_seed, true, false);
            e.value.data[c] = saved;
            const double g_fd = (lp - lm) / (2.0 * step);
            const double g_an = analytic[gi].data[c];
            const double denom = std::max({std::abs(g_an), std::abs(g_fd), denom_floor});
            const double rel = std::abs(g_an - g_fd) / denom;
            ++rep.coords_checked;
            if (rel > rep.max_rel_error) {
                rep.max_rel_error = rel;
                rep.worst_param = e.name;
            }
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    GradCheckReport report;
    for (const auto& rep : partial) {
        report.coords_checked += rep.coords_checked;
        if (rep.max_rel_error > report.max_rel_error) {
            report.max_rel_error = rep.max_rel_error;
            report.worst_param = rep.worst_param;
        }
    }
    return report;
}

double pair_accuracy(DualModel& model, const std::vector<PairExample>& pairs) {
    if (pairs.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& p : pairs) {
        const double prob = model.predict_prob(p);
        if ((prob > 0.5) == (p.label == 1)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace ad
