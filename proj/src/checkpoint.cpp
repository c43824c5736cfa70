// SPDX-License-Identifier: Apache-2.0
#include "loadfc/checkpoint.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "loadfc/data_ingest.hpp"
#include "loadfc/error.hpp"
#include "loadfc/optim.hpp"

namespace loadfc {

namespace {

constexpr std::string_view kFormat = "loadfc-checkpoint-1";

double parse_real(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorKind::SchemaMismatch, std::string(what) + ": bad number '" +
                                               std::string(s) + "'");
  return v;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

}  // namespace

std::string write_checkpoint(Model& model, const CheckpointMeta& meta,
                             bool use_averages) {
  KeyValues kv;
  kv.set("format", std::string(kFormat));
  const KeyValues config = model.config().to_kv();
  for (const auto& [k, v] : config.items()) kv.set(k, v);
  kv.set("scaler_mean", format_double(meta.scaler.mean));
  kv.set("scaler_scale", format_double(meta.scaler.scale));
  kv.set("autocorr_year", format_double(meta.autocorr.year.value));
  kv.set("autocorr_quarter", format_double(meta.autocorr.quarter.value));
  kv.set("step", std::to_string(meta.step));
  const bool averaged = use_averages && asgd_ready(model.fc_parameters());
  kv.set("fc_values", averaged ? "asgd_average" : "raw");

  std::string out = kv.str();
  out += "---\n";
  std::vector<Parameter*> fc = model.fc_parameters();
  for (Parameter* p : model.parameters()) {
    const bool is_fc = std::find(fc.begin(), fc.end(), p) != fc.end();
    const Tensor& v = averaged && is_fc ? *p->asgd_avg : p->value;
    out += "param name=" + p->name + " shape=" + v.shape().str() +
           " initializer=" + p->initializer + " seed=" + std::to_string(p->seed) + "\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += format_double(v[i]);
    }
    out += '\n';
  }
  return out;
}

LoadedCheckpoint read_checkpoint(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t sep = 0;
  while (sep < lines.size() && lines[sep] != "---") ++sep;
  if (sep == lines.size())
    throw Error(ErrorKind::SchemaMismatch, "checkpoint has no '---' separator");

  std::string header;
  for (std::size_t i = 0; i < sep; ++i) {
    header += lines[i];
    header += '\n';
  }
  const KeyValues kv = KeyValues::parse(header);
  if (kv.require("format") != kFormat)
    throw Error(ErrorKind::SchemaMismatch, "unknown checkpoint format " + kv.require("format"));

  LoadedCheckpoint out;
  const ModelConfig config = ModelConfig::from_kv(kv);
  out.meta.scaler = {parse_real(kv.require("scaler_mean"), "scaler_mean"),
                     parse_real(kv.require("scaler_scale"), "scaler_scale")};
  out.meta.autocorr = {
      {kAnnualLagSteps, parse_real(kv.require("autocorr_year"), "autocorr_year")},
      {kQuarterLagSteps, parse_real(kv.require("autocorr_quarter"), "autocorr_quarter")}};
  out.meta.step = static_cast<std::size_t>(parse_real(kv.require("step"), "step"));
  out.model = Model::create(config);

  std::map<std::string, Parameter*, std::less<>> by_name;
  for (Parameter* p : out.model->parameters()) by_name[p->name] = p;
  for (std::size_t i = sep + 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    if (!line.starts_with("param "))
      throw Error(ErrorKind::SchemaMismatch, "expected a 'param' line, got '" +
                                                 std::string(line.substr(0, 40)) + "'");
    std::string name, shape;
    std::string_view rest = line.substr(6);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const std::string_view tok = rest.substr(0, sp);
      if (tok.starts_with("name=")) name = tok.substr(5);
      if (tok.starts_with("shape=")) shape = tok.substr(6);
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    const auto it = by_name.find(name);
    if (it == by_name.end())
      throw Error(ErrorKind::SchemaMismatch, "unknown parameter '" + name + "'");
    Parameter& p = *it->second;
    if (!(Shape::parse(shape) == p.value.shape())) {
      throw Error(ErrorKind::SchemaMismatch, name + " has shape " + shape +
                                                 ", config implies " + p.value.shape().str());
    }
    if (++i >= lines.size())
      throw Error(ErrorKind::SchemaMismatch, "missing values for " + name);
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != p.value.size()) {
      throw Error(ErrorKind::SchemaMismatch,
                  name + " has " + std::to_string(fields.size()) + " values, expected " +
                      std::to_string(p.value.size()));
    }
    for (std::size_t k = 0; k < fields.size(); ++k) p.value[k] = parse_real(fields[k], name);
    by_name.erase(it);
  }
  if (!by_name.empty())
    throw Error(ErrorKind::SchemaMismatch, "checkpoint lacks parameter " + by_name.begin()->first);
  return out;
}

}  // namespace loadfc
