#pragma once

#include <string>

#include "ad/corpus.hpp"
#include "ad/model.hpp"
#include "ad/train.hpp"
#include "json.hpp"

namespace ad {

using ordered_json = nlohmann::ordered_json;

// Config <-> JSON (canonical field names follow the hyperparameter schema).
ordered_json encoder_config_to_json(const EncoderConfig& cfg);
EncoderConfig encoder_config_from_json(const ordered_json& j);
ordered_json fusion_config_to_json(const FusionConfig& cfg);
FusionConfig fusion_config_from_json(const ordered_json& j);
ordered_json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const ordered_json& j);
ordered_json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const ordered_json& j);
ordered_json synth_config_to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const ordered_json& j);

// Checkpoint bytes: magic + version, a JSON header (config echo, embedded
// vocabularies, parameter manifest with shapes and byte offsets), then flat
// little-endian 64-bit float arrays in manifest order.
std::string save_model(const DualModel& model);
DualModel load_model(const std::string& bytes);

// Optional replacement parameter values (entry order), e.g. the best-dev
// snapshot from training.
std::string save_model_with_params(const DualModel& model, const std::vector<Tensor>& values);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ad
