// SPDX-License-Identifier: Apache-2.0
#include "loadfc/models.hpp"

#include <charconv>
#include <string>

#include "loadfc/error.hpp"

namespace loadfc {

namespace {

std::size_t parse_size(const KeyValues& kv, std::string_view key) {
  const std::string s = kv.require(key);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorKind::SchemaMismatch, std::string(key) + " is not a count: " + s);
  return v;
}

}  // namespace

std::string_view to_string(ModelKind k) noexcept {
  return k == ModelKind::Model1 ? "model1" : "seq2seq";
}

std::optional<ModelKind> parse_model_kind(std::string_view tag) noexcept {
  if (tag == "model1") return ModelKind::Model1;
  if (tag == "seq2seq") return ModelKind::Seq2Seq;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (hidden < 1 || input_dim < 1 || training_window < 1 || predict_window < 1)
    throw Error(ErrorKind::BadShape, "model sizes must be >= 1");
  if (kind == ModelKind::Seq2Seq) {
    if (input_dim < 2)
      throw Error(ErrorKind::BadShape, "seq2seq needs demand plus >= 1 covariate");
    if (decoder_hidden != hidden) {
      throw Error(ErrorKind::ShapeMismatch,
                  "encoder hidden " + std::to_string(hidden) +
                      " != decoder hidden " + std::to_string(decoder_hidden));
    }
  }
  if (fc_initializer == Initializer::Zero &&
      activation_derivative_at_zero(fc_activation) == 0.0) {
    throw Error(ErrorKind::BadShape,
                "zero-initialized output layer needs an activation with a "
                "nonzero slope at 0");
  }
}

KeyValues ModelConfig::to_kv() const {
  KeyValues kv;
  kv.set("model", std::string(to_string(kind)));
  kv.set("input_dim", std::to_string(input_dim));
  kv.set("hidden", std::to_string(hidden));
  kv.set("decoder_hidden", std::to_string(decoder_hidden));
  kv.set("fc_activation", std::string(to_string(fc_activation)));
  kv.set("fc_initializer", std::string(to_string(fc_initializer)));
  kv.set("training_window", std::to_string(training_window));
  kv.set("predict_window", std::to_string(predict_window));
  kv.set("seed", std::to_string(seed));
  return kv;
}

ModelConfig ModelConfig::from_kv(const KeyValues& kv) {
  ModelConfig c;
  const auto kind = parse_model_kind(kv.require("model"));
  const auto act = parse_activation(kv.require("fc_activation"));
  const auto init = parse_initializer(kv.require("fc_initializer"));
  if (!kind || !act || !init)
    throw Error(ErrorKind::SchemaMismatch, "unknown model/activation/initializer tag");
  c.kind = *kind;
  c.fc_activation = *act;
  c.fc_initializer = *init;
  c.input_dim = parse_size(kv, "input_dim");
  c.hidden = parse_size(kv, "hidden");
  c.decoder_hidden = parse_size(kv, "decoder_hidden");
  c.training_window = parse_size(kv, "training_window");
  c.predict_window = parse_size(kv, "predict_window");
  c.seed = parse_size(kv, "seed");
  c.validate();
  return c;
}

std::unique_ptr<Model> Model::create(const ModelConfig& config) {
  config.validate();
  if (config.kind == ModelKind::Model1) return std::make_unique<Model1>(config);
  return std::make_unique<Seq2Seq>(config);
}

void Model::check_input(const WindowInput& input) const {
  if (input.x.rows() != config_.training_window ||
      input.x.cols() != config_.input_dim) {
    throw Error(ErrorKind::ShapeMismatch,
                "x window " + input.x.shape().str() + ", expected " +
                    std::to_string(config_.training_window) + "x" +
                    std::to_string(config_.input_dim));
  }
  if (config_.kind == ModelKind::Seq2Seq &&
      (input.y_features.rows() != config_.predict_window ||
       input.y_features.cols() != config_.input_dim - 1)) {
    throw Error(ErrorKind::ShapeMismatch,
                "y features " + input.y_features.shape().str() + ", expected " +
                    std::to_string(config_.predict_window) + "x" +
                    std::to_string(config_.input_dim - 1));
  }
}

Model1::Model1(const ModelConfig& config) : Model(config) {
  CounterRng gru_rng(config.seed, rng_stream::kEncoder);
  CounterRng fc_rng(config.seed, rng_stream::kOutput);
  gru = GruParams("gru", config.input_dim, config.hidden, gru_rng, config.seed);
  fc = DenseParams("fc", config.hidden, config.predict_window,
                   config.fc_activation, config.fc_initializer, fc_rng,
                   config.seed);
}

std::vector<Parameter*> Model1::parameters() {
  auto ps = gru.parameters();
  for (Parameter* p : fc.parameters()) ps.push_back(p);
  return ps;
}

ForwardResult Model1::forward(Tape& tape, const WindowInput& input) {
  check_input(input);
  const Var x = tape.constant(input.x);
  const Var h0 = tape.constant(Tensor(Shape{1, config_.hidden}));
  const auto states = gru_sequence(gru, x, h0);
  ForwardResult r;
  r.encoder_final = states.back();
  r.rnn_outputs.push_back(stack_rows(states));
  r.prediction = dense_forward(fc, states.back());
  return r;
}

Seq2Seq::Seq2Seq(const ModelConfig& config) : Model(config) {
  CounterRng enc_rng(config.seed, rng_stream::kEncoder);
  CounterRng dec_rng(config.seed, rng_stream::kDecoder);
  CounterRng fc_rng(config.seed, rng_stream::kOutput);
  encoder = GruParams("encoder", config.input_dim, config.hidden, enc_rng,
                      config.seed);
  decoder = GruParams("decoder", config.input_dim, config.decoder_hidden,
                      dec_rng, config.seed);
  fc = DenseParams("fc", config.decoder_hidden, 1, config.fc_activation,
                   config.fc_initializer, fc_rng, config.seed);
}

std::vector<Parameter*> Seq2Seq::parameters() {
  auto ps = encoder.parameters();
  for (Parameter* p : decoder.parameters()) ps.push_back(p);
  for (Parameter* p : fc.parameters()) ps.push_back(p);
  return ps;
}

ForwardResult Seq2Seq::forward(Tape& tape, const WindowInput& input) {
  check_input(input);
  const Var x = tape.constant(input.x);
  const Var h0 = tape.constant(Tensor(Shape{1, config_.hidden}));
  const auto enc_states = gru_sequence(encoder, x, h0);

  ForwardResult r;
  r.encoder_final = enc_states.back();
  r.decoder_initial = enc_states.back();
  r.rnn_outputs.push_back(stack_rows(enc_states));

  const Var covariates = tape.constant(input.y_features);
  Var prev = tape.constant(
      Tensor::scalar(input.x.at(config_.training_window - 1, 0)));
  Var h = r.decoder_initial;
  std::vector<Var> dec_states;
  std::vector<Var> outputs;
  dec_states.reserve(config_.predict_window);
  outputs.reserve(config_.predict_window);
  for (std::size_t t = 0; t < config_.predict_window; ++t) {
    const Var step_in = concat_cols(slice_rows(covariates, t, 1), prev);
    h = gru_step(decoder, step_in, h);
    dec_states.push_back(h);
    prev = dense_forward(fc, h);
    outputs.push_back(prev);
  }
  r.rnn_outputs.push_back(stack_rows(dec_states));
  r.prediction = stack_rows(outputs);
  return r;
}

}  // namespace loadfc
