#include "ad/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ad {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'C', 'K', 'P', 'T', '0', '1'};

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t read_u64_le(const std::string& bytes, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
    return v;
}

void append_f64_le(std::string& out, double d) {
    append_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

double read_f64_le(const std::string& bytes, std::size_t off) {
    return std::bit_cast<double>(read_u64_le(bytes, off));
}

}  // namespace

ordered_json encoder_config_to_json(const EncoderConfig& cfg) {
    ordered_json j = ordered_json::object();
    j["vocab_size"] = cfg.vocab_size;
    j["hidden_size"] = cfg.hidden_size;
    j["num_hidden_layers"] = cfg.num_hidden_layers;
    j["num_attention_heads"] = cfg.num_attention_heads;
    j["intermediate_size"] = cfg.intermediate_size;
    j["hidden_act"] = cfg.hidden_act;
    j["hidden_dropout_prob"] = cfg.hidden_dropout_prob;
    j["attention_probs_dropout_prob"] = cfg.attention_probs_dropout_prob;
    j["max_position_embeddings"] = cfg.max_position_embeddings;
    j["layer_norm_eps"] = cfg.layer_norm_eps;
    j["initializer_range"] = cfg.initializer_range;
    j["position_embedding_type"] = cfg.position_embedding_type;
    return j;
}

EncoderConfig encoder_config_from_json(const ordered_json& j) {
    EncoderConfig cfg;
    if (j.contains("vocab_size")) cfg.vocab_size = j["vocab_size"].get<std::size_t>();
    if (j.contains("hidden_size")) cfg.hidden_size = j["hidden_size"].get<std::size_t>();
    if (j.contains("num_hidden_layers")) cfg.num_hidden_layers = j["num_hidden_layers"].get<std::size_t>();
    if (j.contains("num_attention_heads")) cfg.num_attention_heads = j["num_attention_heads"].get<std::size_t>();
    if (j.contains("intermediate_size")) cfg.intermediate_size = j["intermediate_size"].get<std::size_t>();
    if (j.contains("hidden_act")) cfg.hidden_act = j["hidden_act"].get<std::string>();
    if (j.contains("hidden_dropout_prob")) cfg.hidden_dropout_prob = j["hidden_dropout_prob"].get<double>();
    if (j.contains("attention_probs_dropout_prob"))
        cfg.attention_probs_dropout_prob = j["attention_probs_dropout_prob"].get<double>();
    if (j.contains("max_position_embeddings"))
        cfg.max_position_embeddings = j["max_position_embeddings"].get<std::size_t>();
    if (j.contains("layer_norm_eps")) cfg.layer_norm_eps = j["layer_norm_eps"].get<double>();
    if (j.contains("initializer_range")) cfg.initializer_range = j["initializer_range"].get<double>();
    if (j.contains("position_embedding_type"))
        cfg.position_embedding_type = j["position_embedding_type"].get<std::string>();
    return cfg;
}

ordered_json fusion_config_to_json(const FusionConfig& cfg) {
    ordered_json j = ordered_json::object();
    j["input_dim"] = cfg.input_dim;
    j["mlp_dims"] = cfg.mlp_dims;
    j["dropout_prob"] = cfg.dropout_prob;
    j["lambda"] = cfg.lambda;
    j["regularize_set"] = cfg.regularize_set == RegularizeSet::AllParams ? "all_params" : "weights_only";
    return j;
}

FusionConfig fusion_config_from_json(const ordered_json& j) {
    FusionConfig cfg;
    if (j.contains("input_dim")) cfg.input_dim = j["input_dim"].get<std::size_t>();
    if (j.contains("mlp_dims")) {
        auto dims = j["mlp_dims"].get<std::vector<std::size_t>>();
        if (dims.size() != 3) throw ValidationError("fusion config: mlp_dims must list exactly 3 widths");
        std::copy(dims.begin(), dims.end(), cfg.mlp_dims.begin());
    }
    if (j.contains("dropout_prob")) cfg.dropout_prob = j["dropout_prob"].get<double>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("regularize_set")) {
        const std::string v = j["regularize_set"].get<std::string>();
        if (v == "all_params") cfg.regularize_set = RegularizeSet::AllParams;
        else if (v == "weights_only") cfg.regularize_set = RegularizeSet::WeightsOnly;
        else throw ValidationError("fusion config: unknown regularize_set '" + v + "'");
    }
    return cfg;
}

ordered_json model_config_to_json(const ModelConfig& cfg) {
    ordered_json j = ordered_json::object();
    j["paths"] = path_mode_name(cfg.paths);
    j["max_len"] = cfg.max_len;
    j["encoder_a"] = encoder_config_to_json(cfg.enc_a);
    j["encoder_b"] = encoder_config_to_json(cfg.enc_b);
    j["fusion"] = fusion_config_to_json(cfg.fusion);
    return j;
}

ModelConfig model_config_from_json(const ordered_json& j) {
    ModelConfig cfg;
    if (j.contains("paths")) cfg.paths = path_mode_from_name(j["paths"].get<std::string>());
    if (j.contains("max_len")) cfg.max_len = j["max_len"].get<std::size_t>();
    if (j.contains("encoder_a")) cfg.enc_a = encoder_config_from_json(j["encoder_a"]);
    if (j.contains("encoder_b")) cfg.enc_b = encoder_config_from_json(j["encoder_b"]);
    if (j.contains("fusion")) cfg.fusion = fusion_config_from_json(j["fusion"]);
    return cfg;
}

ordered_json train_config_to_json(const TrainConfig& cfg) {
    ordered_json j = ordered_json::object();
    j["optimizer"] = cfg.optimizer == OptimizerKind::Adam ? "adam" : "sgd";
    j["learning_rate"] = cfg.learning_rate;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["lambda"] = cfg.lambda;
    j["seed"] = cfg.seed;
    j["shuffle"] = cfg.shuffle;
    j["eval_every"] = cfg.eval_every;
    return j;
}

TrainConfig train_config_from_json(const ordered_json& j) {
    TrainConfig cfg;
    if (j.contains("optimizer")) {
        const std::string v = j["optimizer"].get<std::string>();
        if (v == "adam") cfg.optimizer = OptimizerKind::Adam;
        else if (v == "sgd") cfg.optimizer = OptimizerKind::Sgd;
        else throw ValidationError("train config: unknown optimizer '" + v + "'");
    }
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("shuffle")) cfg.shuffle = j["shuffle"].get<bool>();
    if (j.contains("eval_every")) cfg.eval_every = j["eval_every"].get<std::size_t>();
    return cfg;
}

ordered_json synth_config_to_json(const SynthConfig& cfg) {
    ordered_json j = ordered_json::object();
    j["num_acronyms"] = cfg.num_acronyms;
    j["min_long_forms"] = cfg.min_long_forms;
    j["max_long_forms"] = cfg.max_long_forms;
    j["sentences_per_long_form"] = cfg.sentences_per_long_form;
    j["cue_strength"] = cfg.cue_strength;
    j["train_fraction"] = cfg.train_fraction;
    j["dev_fraction"] = cfg.dev_fraction;
    j["test_fraction"] = cfg.test_fraction;
    j["seed"] = cfg.seed;
    return j;
}

SynthConfig synth_config_from_json(const ordered_json& j) {
    SynthConfig cfg;
    if (j.contains("num_acronyms")) cfg.num_acronyms = j["num_acronyms"].get<std::size_t>();
    if (j.contains("min_long_forms")) cfg.min_long_forms = j["min_long_forms"].get<std::size_t>();
    if (j.contains("max_long_forms")) cfg.max_long_forms = j["max_long_forms"].get<std::size_t>();
    if (j.contains("sentences_per_long_form"))
        cfg.sentences_per_long_form = j["sentences_per_long_form"].get<std::size_t>();
    if (j.contains("cue_strength")) cfg.cue_strength = j["cue_strength"].get<double>();
    if (j.contains("train_fraction")) cfg.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("dev_fraction")) cfg.dev_fraction = j["dev_fraction"].get<double>();
    if (j.contains("test_fraction")) cfg.test_fraction = j["test_fraction"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

std::string save_model_with_params(const DualModel& model, const std::vector<Tensor>& values) {
    const auto& entries = model.params().entries();
    if (values.size() != entries.size())
        throw ValidationError("save_model: parameter snapshot size mismatch");

    ordered_json header = ordered_json::object();
    header["format_version"] = 1;
    header["model_config"] = model_config_to_json(model.config());
    header["bpe_vocab"] = model.bpe().serialize();
    header["wp_vocab"] = model.wp().serialize();
    ordered_json manifest = ordered_json::array();
    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        ordered_json m = ordered_json::object();
        m["name"] = entries[i].name;
        m["shape"] = values[i].shape;
        m["offset"] = offset;
        manifest.push_back(std::move(m));
        offset += 8 * values[i].size();
    }
    header["params"] = std::move(manifest);
    const std::string header_str = header.dump();

    std::string out;
    out.reserve(16 + header_str.size() + offset);
    out.append(kMagic, sizeof(kMagic));
    append_u64_le(out, header_str.size());
    out += header_str;
    for (const auto& t : values)
        for (double d : t.data) append_f64_le(out, d);
    return out;
}

std::string save_model(const DualModel& model) {
    std::vector<Tensor> values;
    values.reserve(model.params().entries().size());
    for (const auto& e : model.params().entries()) values.push_back(e.value);
    return save_model_with_params(model, values);
}

DualModel load_model(const std::string& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw IoError("checkpoint: bad magic or truncated file");
    const std::uint64_t header_len = read_u64_le(bytes, 8);
    if (16 + header_len > bytes.size()) throw IoError("checkpoint: truncated header");
    ordered_json header;
    try {
        header = ordered_json::parse(bytes.substr(16, header_len));
    } catch (const std::exception& e) {
        throw IoError(std::string("checkpoint: malformed header JSON: ") + e.what());
    }
    if (!header.contains("format_version") || header["format_version"].get<int>() != 1)
        throw IoError("checkpoint: unsupported format version");

    ModelConfig cfg = model_config_from_json(header["model_config"]);
    BpeVocab bpe = BpeVocab::deserialize(header["bpe_vocab"].get<std::string>());
    WordPieceVocab wp = WordPieceVocab::deserialize(header["wp_vocab"].get<std::string>());

    ParamSet params;
    const std::size_t data_base = 16 + header_len;
    for (const auto& m : header["params"]) {
        const std::string name = m["name"].get<std::string>();
        const auto shape = m["shape"].get<std::vector<std::size_t>>();
        const std::uint64_t offset = m["offset"].get<std::uint64_t>();
        Tensor t(shape);
        const std::size_t begin = data_base + offset;
        if (begin + 8 * t.size() > bytes.size()) throw IoError("checkpoint: truncated parameter data");
        for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = read_f64_le(bytes, begin + 8 * i);
        params.add(name, std::move(t));
    }
    return DualModel::assemble(std::move(cfg), std::move(bpe), std::move(wp), std::move(params));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure: " + path);
    return content;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure: " + path);
}

}  // namespace ad
