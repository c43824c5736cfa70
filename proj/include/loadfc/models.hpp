// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "loadfc/features.hpp"
#include "loadfc/keyvalue.hpp"
#include "loadfc/layers.hpp"

namespace loadfc {

enum class ModelKind { Model1, Seq2Seq };

std::string_view to_string(ModelKind k) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view tag) noexcept;

struct ModelConfig {
  ModelKind kind = ModelKind::Seq2Seq;
  std::size_t input_dim = kFeatureCount;
  std::size_t hidden = 64;          // Model 1 GRU / seq2seq encoder
  std::size_t decoder_hidden = 64;  // seq2seq only; must equal hidden
  Activation fc_activation = Activation::Identity;
  Initializer fc_initializer = Initializer::Zero;
  std::size_t training_window = kDefaultTrainingWindow;
  std::size_t predict_window = kDefaultPredictWindow;
  std::uint64_t seed = 0;

  /// Throws BadShape / ShapeMismatch on an inconsistent configuration.
  void validate() const;
  KeyValues to_kv() const;
  static ModelConfig from_kv(const KeyValues& kv);
};

/// One model input. `x` is [training_window, input_dim] with the observed
/// demand in column 0; `y_features` is [predict_window, input_dim - 1], the
/// horizon's known covariates.
struct WindowInput {
  Tensor x;
  Tensor y_features;
};

struct ForwardResult {
  Var prediction;                // predict_window values
  std::vector<Var> rnn_outputs;  // stacked hidden states, one per GRU block
  Var encoder_final;             // last encoder hidden state
  Var decoder_initial;           // seq2seq only
};

class Model {
 public:
  virtual ~Model() = default;

  static std::unique_ptr<Model> create(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  virtual ForwardResult forward(Tape& tape, const WindowInput& input) = 0;
  virtual std::vector<Parameter*> parameters() = 0;
  /// The fully connected output layer, the only block ASGD averages.
  virtual DenseParams& output_layer() = 0;
  std::vector<Parameter*> fc_parameters() { return output_layer().parameters(); }

 protected:
  explicit Model(ModelConfig config) : config_(std::move(config)) {}
  void check_input(const WindowInput& input) const;
  ModelConfig config_;
};

/// GRU over the window; the final hidden state feeds one FC layer that
/// emits the whole horizon at once.
class Model1 final : public Model {
 public:
  explicit Model1(const ModelConfig& config);
  ForwardResult forward(Tape& tape, const WindowInput& input) override;
  std::vector<Parameter*> parameters() override;
  DenseParams& output_layer() override { return fc; }

  GruParams gru;
  DenseParams fc;  // [hidden, predict_window]
};

/// GRU encoder whose final state seeds an autoregressive GRU decoder. Each
/// decoder step sees the horizon covariates plus the previous prediction
/// (the last observed demand at step 0) and emits one value through the
/// shared FC layer.
class Seq2Seq final : public Model {
 public:
  explicit Seq2Seq(const ModelConfig& config);
  ForwardResult forward(Tape& tape, const WindowInput& input) override;
  std::vector<Parameter*> parameters() override;
  DenseParams& output_layer() override { return fc; }

  GruParams encoder;
  GruParams decoder;  // input: y_features row + previous prediction
  DenseParams fc;     // [decoder_hidden, 1]
};

}  // namespace loadfc
