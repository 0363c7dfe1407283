#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ad/checkpoint.hpp"
#include "ad/corpus.hpp"
#include "ad/eval.hpp"
#include "ad/log.hpp"
#include "ad/model.hpp"
#include "ad/train.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ad::ordered_json;

namespace {

constexpr std::size_t kDefaultBpeMerges = 1024;
constexpr std::size_t kDefaultWpVocabSize = 2048;

// Table 3 full-scale vocabulary sizes, kept as named presets; toy runs train
// their own small vocabularies instead.
[[maybe_unused]] constexpr std::size_t kFullScaleBpeVocab = 50265;
[[maybe_unused]] constexpr std::size_t kFullScaleWpVocab = 31090;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t threads = 1;
};

ordered_json load_run_config(const std::string& path) {
    if (path.empty()) return ordered_json::object();
    try {
        return ordered_json::parse(ad::read_file(path));
    } catch (const ad::IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw ad::ValidationError("config file " + path + ": " + e.what());
    }
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ad::IoError("cannot create output directory " + dir + ": " + ec.message());
}

// Flags win over the config file; the merged result is echoed into the
// output directory so every run is reproducible from its artifacts.
void echo_config(const std::string& out_dir, ordered_json effective) {
    effective["format_version"] = 1;
    ad::write_file((fs::path(out_dir) / "effective_config.json").string(), effective.dump(2) + "\n");
}

ordered_json stats_to_json(const ad::CorpusStats& stats) {
    ordered_json j = ordered_json::object();
    j["num_acronyms"] = stats.num_acronyms;
    j["num_acronyms_attested"] = stats.num_acronyms_attested;
    j["avg_long_forms_per_acronym"] = stats.avg_long_forms_per_acronym;
    j["avg_sentence_length"] = stats.avg_sentence_length;
    j["overlap_ratio"] = stats.overlap_ratio;
    ordered_json splits = ordered_json::object();
    for (const auto& [name, n] : stats.split_sizes) splits[name] = n;
    j["split_sizes"] = std::move(splits);
    return j;
}

ad::FieldAdapter load_adapter(const std::string& path) {
    ad::FieldAdapter adapter;
    if (path.empty()) return adapter;
    ordered_json j = ordered_json::parse(ad::read_file(path));
    for (auto& [k, v] : j.items()) adapter[k] = v.get<std::string>();
    return adapter;
}

ad::UpsampleMode upsample_mode_from_name(const std::string& name) {
    if (name == "none") return ad::UpsampleMode::None;
    if (name == "full") return ad::UpsampleMode::Full;
    if (name == "balanced") return ad::UpsampleMode::Balanced;
    throw ad::ValidationError("unknown upsample mode '" + name + "' (expected none, full, balanced)");
}

std::vector<std::string> tokenizer_corpus(const std::vector<ad::SentenceSample>& samples,
                                          const ad::Dictionary& dict) {
    std::vector<std::string> corpus;
    corpus.reserve(samples.size() + dict.size());
    for (const auto& s : samples) {
        std::string line;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (i) line += ' ';
            line += s.tokens[i];
        }
        corpus.push_back(std::move(line));
    }
    for (const auto& acr : dict.acronyms())
        for (const auto& lf : dict.candidates(acr)) corpus.push_back(lf);
    return corpus;
}

ad::ModelConfig default_model_config() {
    ad::ModelConfig cfg;
    cfg.enc_a.hidden_size = 64;
    cfg.enc_a.num_hidden_layers = 2;
    cfg.enc_a.num_attention_heads = 4;
    cfg.enc_a.intermediate_size = 256;
    cfg.enc_a.layer_norm_eps = 1e-5;
    cfg.enc_a.max_position_embeddings = 64;
    // roughly 1/sqrt(hidden); the BERT-style 0.02 default starves gradients
    // at these widths
    cfg.enc_a.initializer_range = 0.125;
    cfg.enc_b.hidden_size = 48;
    cfg.enc_b.num_hidden_layers = 2;
    cfg.enc_b.num_attention_heads = 4;
    cfg.enc_b.intermediate_size = 192;
    cfg.enc_b.layer_norm_eps = 1e-12;
    cfg.enc_b.max_position_embeddings = 64;
    cfg.enc_b.initializer_range = 0.144;
    cfg.max_len = 64;
    return cfg;
}

int cmd_gen(const CommonArgs& common) {
    ordered_json run = load_run_config(common.config_path);
    ad::SynthConfig cfg = run.contains("synth") ? ad::synth_config_from_json(run["synth"]) : ad::SynthConfig{};
    if (common.seed_set) cfg.seed = common.seed;
    ensure_out_dir(common.out_dir);

    ad::SynthCorpus corpus = ad::gen_synthetic(cfg);
    const fs::path out(common.out_dir);
    ad::write_file((out / "dictionary.json").string(), ad::serialize_dictionary(corpus.dict));
    ad::write_file((out / "train.json").string(), ad::serialize_samples(corpus.train));
    ad::write_file((out / "dev.json").string(), ad::serialize_samples(corpus.dev));
    ad::write_file((out / "test.json").string(), ad::serialize_samples(corpus.test));

    std::vector<ad::SentenceSample> all;
    all.insert(all.end(), corpus.train.begin(), corpus.train.end());
    all.insert(all.end(), corpus.dev.begin(), corpus.dev.end());
    all.insert(all.end(), corpus.test.begin(), corpus.test.end());
    ad::CorpusStats stats = ad::compute_stats(all, corpus.dict);
    stats.split_sizes = {{"train", corpus.train.size()}, {"dev", corpus.dev.size()}, {"test", corpus.test.size()}};
    const ordered_json stats_json = stats_to_json(stats);
    ad::write_file((out / "stats.json").string(), stats_json.dump(2) + "\n");
    std::cout << stats_json.dump(2) << "\n";

    ordered_json echo = ordered_json::object();
    echo["command"] = "gen";
    echo["synth"] = ad::synth_config_to_json(cfg);
    echo_config(common.out_dir, std::move(echo));
    return 0;
}

int cmd_stats(const std::string& dict_path, const std::string& samples_path,
              const std::string& adapter_path) {
    ad::Dictionary dict = ad::load_dictionary(ad::read_file(dict_path));
    auto samples = ad::load_samples(ad::read_file(samples_path), dict, false, load_adapter(adapter_path));
    ad::CorpusStats stats = ad::compute_stats(samples, dict);
    stats.split_sizes = {{"samples", samples.size()}};
    std::cout << stats_to_json(stats).dump(2) << "\n";
    return 0;
}

int cmd_pairs(const std::string& dict_path, const std::string& samples_path,
              const std::string& adapter_path, const std::string& out_file,
              ad::UpsampleMode mode) {
    ad::Dictionary dict = ad::load_dictionary(ad::read_file(dict_path));
    auto samples = ad::load_samples(ad::read_file(samples_path), dict, true, load_adapter(adapter_path));
    auto pairs = ad::build_pairs(samples, dict, mode);
    ad::write_file(out_file, ad::serialize_pairs(pairs));
    std::size_t positives = 0;
    for (const auto& p : pairs) positives += static_cast<std::size_t>(p.label);
    ordered_json j = ordered_json::object();
    j["pairs"] = pairs.size();
    j["positives"] = positives;
    j["negatives"] = pairs.size() - positives;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_tok_train(bool bpe, const std::string& dict_path, const std::string& samples_path,
                  const std::string& adapter_path, std::size_t size, const std::string& out_file) {
    ad::Dictionary dict = ad::load_dictionary(ad::read_file(dict_path));
    auto samples = ad::load_samples(ad::read_file(samples_path), dict, false, load_adapter(adapter_path));
    const auto corpus = tokenizer_corpus(samples, dict);
    if (bpe) {
        ad::BpeVocab vocab = ad::BpeVocab::train(corpus, size);
        ad::write_file(out_file, vocab.serialize());
        ad::log_info("trained BPE vocab: " + std::to_string(vocab.vocab_size()) + " tokens (" +
                     std::to_string(vocab.num_merges()) + " merges)");
    } else {
        ad::WordPieceVocab vocab = ad::WordPieceVocab::build(corpus, size);
        ad::write_file(out_file, vocab.serialize());
        ad::log_info("trained WordPiece vocab: " + std::to_string(vocab.vocab_size()) + " tokens");
    }
    return 0;
}

struct TrainArgs {
    std::string dict_path, train_path, dev_path, adapter_path;
    std::string bpe_vocab_path, wp_vocab_path;
    std::string preset = "toy";
    std::string paths = "dual";
    std::string upsample_mode = "full";
    std::string optimizer;
    double learning_rate = 0.0;
    long long epochs = -1;
    long long batch_size = -1;
    double lambda = -1.0;
    std::size_t bpe_merges = kDefaultBpeMerges;
    std::size_t wp_vocab_size = kDefaultWpVocabSize;
};

int cmd_train(const CommonArgs& common, const TrainArgs& args) {
    ordered_json run = load_run_config(common.config_path);
    ensure_out_dir(common.out_dir);

    ad::Dictionary dict = ad::load_dictionary(ad::read_file(args.dict_path));
    const auto adapter = load_adapter(args.adapter_path);
    auto train_samples = ad::load_samples(ad::read_file(args.train_path), dict, true, adapter);
    std::vector<ad::SentenceSample> dev_samples;
    if (!args.dev_path.empty())
        dev_samples = ad::load_samples(ad::read_file(args.dev_path), dict, true, adapter);

    ad::TrainConfig tcfg = run.contains("train") ? ad::train_config_from_json(run["train"]) : ad::TrainConfig{};
    if (args.preset == "paper") {
        tcfg.learning_rate = 2e-5;  // fine-tuning schedule from the reference setup
        tcfg.epochs = 5;
    } else if (args.preset != "toy") {
        throw ad::ValidationError("unknown preset '" + args.preset + "' (expected toy or paper)");
    }
    if (common.seed_set) tcfg.seed = common.seed;
    if (!args.optimizer.empty())
        tcfg.optimizer = args.optimizer == "sgd" ? ad::OptimizerKind::Sgd : ad::OptimizerKind::Adam;
    if (args.learning_rate > 0.0) tcfg.learning_rate = args.learning_rate;
    if (args.epochs >= 0) tcfg.epochs = static_cast<std::size_t>(args.epochs);
    if (args.batch_size > 0) tcfg.batch_size = static_cast<std::size_t>(args.batch_size);
    if (args.lambda >= 0.0) tcfg.lambda = args.lambda;
    tcfg.validate();

    ad::ModelConfig mcfg = run.contains("model") ? ad::model_config_from_json(run["model"]) : default_model_config();
    mcfg.paths = ad::path_mode_from_name(args.paths);
    mcfg.fusion.lambda = tcfg.lambda;

    ad::BpeVocab bpe;
    ad::WordPieceVocab wp;
    if (!args.bpe_vocab_path.empty()) {
        bpe = ad::BpeVocab::deserialize(ad::read_file(args.bpe_vocab_path));
    } else {
        ad::log_info("no --bpe-vocab given, training one on the input corpus");
        bpe = ad::BpeVocab::train(tokenizer_corpus(train_samples, dict), args.bpe_merges);
    }
    if (!args.wp_vocab_path.empty()) {
        wp = ad::WordPieceVocab::deserialize(ad::read_file(args.wp_vocab_path));
    } else {
        ad::log_info("no --wp-vocab given, training one on the input corpus");
        wp = ad::WordPieceVocab::build(tokenizer_corpus(train_samples, dict), args.wp_vocab_size);
    }

    const ad::UpsampleMode mode = upsample_mode_from_name(args.upsample_mode);
    auto train_pairs = ad::build_pairs(train_samples, dict, mode);
    auto dev_pairs = dev_samples.empty() ? std::vector<ad::PairExample>{}
                                         : ad::build_pairs(dev_samples, dict, ad::UpsampleMode::None);

    ad::DualModel model = ad::DualModel::create(mcfg, std::move(bpe), std::move(wp), tcfg.seed);
    ad::TrainResult result = ad::train(model, train_pairs, dev_pairs, tcfg);

    const fs::path out(common.out_dir);
    ad::write_file((out / "checkpoint.bin").string(), ad::save_model(model));
    ad::write_file((out / "checkpoint_best.bin").string(),
                   ad::save_model_with_params(model, result.best_params));
    ad::write_file((out / "loss.csv").string(), result.history.to_csv());

    ordered_json echo = ordered_json::object();
    echo["command"] = "train";
    echo["preset"] = args.preset;
    echo["upsample_mode"] = args.upsample_mode;
    echo["train"] = ad::train_config_to_json(tcfg);
    echo["model"] = ad::model_config_to_json(model.config());
    echo_config(common.out_dir, echo);

    ordered_json summary = ordered_json::object();
    summary["train_pairs"] = train_pairs.size();
    summary["final_train_loss"] = result.final_train_loss;
    if (!dev_pairs.empty()) {
        summary["best_dev_loss"] = result.best_dev_loss;
        summary["best_dev_epoch"] = result.best_dev_epoch;
    }
    summary["learning_rate"] = tcfg.learning_rate;
    summary["epochs"] = tcfg.epochs;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return buf;
}

int cmd_eval(const CommonArgs& common, const std::vector<std::string>& checkpoints,
             const std::vector<std::string>& labels, const std::string& dict_path,
             const std::string& samples_path, const std::string& adapter_path,
             const std::string& mf_train_path) {
    if (checkpoints.empty()) throw ad::ValidationError("eval: at least one --checkpoint required");
    if (!labels.empty() && labels.size() != checkpoints.size())
        throw ad::ValidationError("eval: --label count must match --checkpoint count");
    ensure_out_dir(common.out_dir);

    ad::Dictionary dict = ad::load_dictionary(ad::read_file(dict_path));
    const auto adapter = load_adapter(adapter_path);
    auto samples = ad::load_samples(ad::read_file(samples_path), dict, true, adapter);

    struct Row {
        std::string label;
        ad::MetricsReport report;
    };
    std::vector<Row> rows;
    const fs::path out(common.out_dir);

    if (!mf_train_path.empty()) {
        auto mf_train = ad::load_samples(ad::read_file(mf_train_path), dict, true, adapter);
        auto result = ad::evaluate(ad::mf_baseline(mf_train, dict), samples, dict, common.threads);
        ad::write_file((out / "report_mf.json").string(), ad::report_to_json(result.report));
        rows.push_back({"mf", result.report});
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        ad::DualModel model = ad::load_model(ad::read_file(checkpoints[i]));
        const std::string label =
            !labels.empty() ? labels[i] : "path-" + ad::path_mode_name(model.config().paths);
        auto result = ad::evaluate(ad::model_scorer(model), samples, dict, common.threads);
        const std::string suffix = checkpoints.size() == 1 ? "" : "_" + label;
        ad::write_file((out / ("report" + suffix + ".json")).string(), ad::report_to_json(result.report));
        ad::write_file((out / ("predictions" + suffix + ".json")).string(),
                       ad::predictions_to_json(result.records));
        rows.push_back({label, result.report});
    }

    // comparison table, one row per method
    std::string table = "Methodology | Macro Precision(%) | Macro Recall(%) | Macro F1(%)\n";
    ordered_json comparison = ordered_json::array();
    for (const auto& row : rows) {
        table += row.label + " | " + percent(row.report.macro_precision) + " | " +
                 percent(row.report.macro_recall) + " | " + percent(row.report.macro_f1) + "\n";
        ordered_json r = ordered_json::object();
        r["label"] = row.label;
        r["macro_precision"] = row.report.macro_precision;
        r["macro_recall"] = row.report.macro_recall;
        r["macro_f1"] = row.report.macro_f1;
        comparison.push_back(std::move(r));
    }
    if (rows.size() > 1) {
        ad::write_file((out / "comparison.txt").string(), table);
        ad::write_file((out / "comparison.json").string(), comparison.dump(2) + "\n");
    }
    std::cout << table;

    ordered_json echo = ordered_json::object();
    echo["command"] = "eval";
    echo["checkpoints"] = checkpoints;
    echo["samples"] = samples_path;
    echo_config(common.out_dir, echo);
    return 0;
}

int cmd_predict(const CommonArgs& common, const std::string& checkpoint_path,
                const std::string& dict_path, const std::string& samples_path,
                const std::string& adapter_path, const std::string& out_file) {
    ad::Dictionary dict = ad::load_dictionary(ad::read_file(dict_path));
    // gold labels optional at prediction time
    auto samples = ad::load_samples(ad::read_file(samples_path), dict, false, load_adapter(adapter_path));
    ad::DualModel model = ad::load_model(ad::read_file(checkpoint_path));
    auto scorer = ad::model_scorer(model);
    std::vector<ad::PredictionRecord> records;
    records.reserve(samples.size());
    for (const auto& s : samples) records.push_back(ad::predict(scorer, s, dict));
    ad::write_file(out_file, ad::predictions_to_json(records));
    (void)common;
    return 0;
}

int cmd_baseline_mf(const CommonArgs& common, const std::string& dict_path,
                    const std::string& train_path, const std::string& samples_path,
                    const std::string& adapter_path) {
    ensure_out_dir(common.out_dir);
    ad::Dictionary dict = ad::load_dictionary(ad::read_file(dict_path));
    const auto adapter = load_adapter(adapter_path);
    auto train_samples = ad::load_samples(ad::read_file(train_path), dict, true, adapter);
    auto samples = ad::load_samples(ad::read_file(samples_path), dict, true, adapter);
    auto result = ad::evaluate(ad::mf_baseline(train_samples, dict), samples, dict, common.threads);
    const fs::path out(common.out_dir);
    ad::write_file((out / "report.json").string(), ad::report_to_json(result.report));
    ad::write_file((out / "predictions.json").string(), ad::predictions_to_json(result.records));
    std::cout << ad::report_to_json(result.report);

    ordered_json echo = ordered_json::object();
    echo["command"] = "baseline-mf";
    echo["train"] = train_path;
    echo["samples"] = samples_path;
    echo_config(common.out_dir, echo);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-path acronym disambiguation pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand name

    CommonArgs common;
    app.add_option("--config", common.config_path, "run configuration JSON")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", common.seed, "root random seed");
    app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", common.threads, "prediction threads")->capture_default_str();

    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");

    std::string dict_path, samples_path, adapter_path, out_file;
    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("--dict", dict_path, "dictionary JSON")->required();
    stats->add_option("--samples", samples_path, "samples JSON")->required();
    stats->add_option("--adapter", adapter_path, "field-mapping adapter JSON");

    bool upsample_flag = false;
    std::string upsample_mode = "none";
    auto* pairs = app.add_subcommand("pairs", "build binary pairs");
    pairs->add_option("--dict", dict_path, "dictionary JSON")->required();
    pairs->add_option("--samples", samples_path, "samples JSON")->required();
    pairs->add_option("--adapter", adapter_path, "field-mapping adapter JSON");
    pairs->add_option("--out-file", out_file, "pairs JSON output")->required();
    pairs->add_flag("--upsample", upsample_flag, "replicate positives (full mode)");
    pairs->add_option("--upsample-mode", upsample_mode, "none|full|balanced");

    std::size_t tok_size = 0;
    auto* tok_bpe = app.add_subcommand("tok-train-bpe", "train the byte-level BPE vocabulary");
    tok_bpe->add_option("--dict", dict_path, "dictionary JSON")->required();
    tok_bpe->add_option("--samples", samples_path, "samples JSON")->required();
    tok_bpe->add_option("--adapter", adapter_path, "field-mapping adapter JSON");
    tok_bpe->add_option("--merges", tok_size, "number of merges")->default_val(kDefaultBpeMerges);
    tok_bpe->add_option("--out-file", out_file, "vocab output file")->required();

    auto* tok_wp = app.add_subcommand("tok-train-wp", "train the WordPiece vocabulary");
    tok_wp->add_option("--dict", dict_path, "dictionary JSON")->required();
    tok_wp->add_option("--samples", samples_path, "samples JSON")->required();
    tok_wp->add_option("--adapter", adapter_path, "field-mapping adapter JSON");
    tok_wp->add_option("--vocab-size", tok_size, "target vocabulary size")->default_val(kDefaultWpVocabSize);
    tok_wp->add_option("--out-file", out_file, "vocab output file")->required();

    TrainArgs targs;
    auto* train = app.add_subcommand("train", "train the dual-path model");
    train->add_option("--dict", targs.dict_path, "dictionary JSON")->required();
    train->add_option("--train-samples", targs.train_path, "training samples JSON")->required();
    train->add_option("--dev-samples", targs.dev_path, "development samples JSON");
    train->add_option("--adapter", targs.adapter_path, "field-mapping adapter JSON");
    train->add_option("--bpe-vocab", targs.bpe_vocab_path, "pre-trained BPE vocab file");
    train->add_option("--wp-vocab", targs.wp_vocab_path, "pre-trained WordPiece vocab file");
    train->add_option("--preset", targs.preset, "toy|paper")->capture_default_str();
    train->add_option("--paths", targs.paths, "dual|a|b")->capture_default_str();
    train->add_option("--upsample-mode", targs.upsample_mode, "none|full|balanced")->capture_default_str();
    train->add_option("--optimizer", targs.optimizer, "adam|sgd");
    train->add_option("--lr", targs.learning_rate, "learning rate override");
    train->add_option("--epochs", targs.epochs, "epoch override");
    train->add_option("--batch-size", targs.batch_size, "batch size override");
    train->add_option("--lambda", targs.lambda, "L2 regularizer override");
    train->add_option("--bpe-merges", targs.bpe_merges, "merges when auto-training BPE")->capture_default_str();
    train->add_option("--wp-vocab-size", targs.wp_vocab_size, "size when auto-training WordPiece")->capture_default_str();

    std::vector<std::string> checkpoints, labels;
    std::string mf_train_path;
    auto* eval = app.add_subcommand("eval", "evaluate checkpoints (multiple = comparison table)");
    eval->add_option("--checkpoint", checkpoints, "model checkpoint (repeatable)")->required();
    eval->add_option("--label", labels, "row label per checkpoint (repeatable)");
    eval->add_option("--dict", dict_path, "dictionary JSON")->required();
    eval->add_option("--samples", samples_path, "evaluation samples JSON")->required();
    eval->add_option("--adapter", adapter_path, "field-mapping adapter JSON");
    eval->add_option("--mf-train", mf_train_path, "training samples for an extra MF baseline row");

    std::string checkpoint_path;
    auto* predict = app.add_subcommand("predict", "predict long forms (gold labels optional)");
    predict->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    predict->add_option("--dict", dict_path, "dictionary JSON")->required();
    predict->add_option("--samples", samples_path, "samples JSON")->required();
    predict->add_option("--adapter", adapter_path, "field-mapping adapter JSON");
    predict->add_option("--out-file", out_file, "predictions JSON output")->required();

    auto* baseline = app.add_subcommand("baseline-mf", "most-frequent baseline");
    baseline->add_option("--dict", dict_path, "dictionary JSON")->required();
    baseline->add_option("--train-samples", samples_path, "training samples JSON");
    std::string eval_samples_path;
    baseline->add_option("--samples", eval_samples_path, "evaluation samples JSON")->required();
    baseline->add_option("--adapter", adapter_path, "field-mapping adapter JSON");

    CLI11_PARSE(app, argc, argv);
    common.seed_set = seed_opt->count() > 0;

    try {
        if (gen->parsed()) return cmd_gen(common);
        if (stats->parsed()) return cmd_stats(dict_path, samples_path, adapter_path);
        if (pairs->parsed()) {
            ad::UpsampleMode mode = upsample_mode_from_name(upsample_mode);
            if (upsample_flag) mode = ad::UpsampleMode::Full;
            return cmd_pairs(dict_path, samples_path, adapter_path, out_file, mode);
        }
        if (tok_bpe->parsed())
            return cmd_tok_train(true, dict_path, samples_path, adapter_path, tok_size, out_file);
        if (tok_wp->parsed())
            return cmd_tok_train(false, dict_path, samples_path, adapter_path, tok_size, out_file);
        if (train->parsed()) return cmd_train(common, targs);
        if (eval->parsed())
            return cmd_eval(common, checkpoints, labels, dict_path, samples_path, adapter_path,
                            mf_train_path);
        if (predict->parsed())
            return cmd_predict(common, checkpoint_path, dict_path, samples_path, adapter_path, out_file);
        if (baseline->parsed())
            return cmd_baseline_mf(common, dict_path, samples_path, eval_samples_path, adapter_path);
        return 1;
    } catch (const ad::ValidationError& e) {
        ad::log_error(e.what());
        return 1;
    } catch (const ad::IoError& e) {
        ad::log_error(e.what());
        return 2;
    } catch (const std::exception& e) {
        ad::log_error(e.what());
        return 1;
    }
}
