// SPDX-License-Identifier: Apache-2.0
#include "loadfc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "loadfc/checkpoint.hpp"
#include "loadfc/error.hpp"
#include "loadfc/forecast.hpp"
#include "loadfc/manifest.hpp"
#include "loadfc/synthetic.hpp"
#include "loadfc/train_eval.hpp"

namespace loadfc {

namespace {

std::string text_of(const std::string& v) { return v; }
std::string text_of(double v) { return format_double(v); }
std::string text_of(std::size_t v) { return std::to_string(v); }
std::string text_of(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

// Registers options and remembers how to print their resolved values, so
// the manifest lists every option including untouched defaults.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& ref, const std::string& help) {
    values_.emplace_back(name, [&ref] { return text_of(ref); });
    return app_->add_option("--" + name, ref, help);
  }

  KeyValues resolved() const {
    KeyValues kv;
    for (const auto& [name, get] : values_) kv.set(name, get());
    return kv;
  }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> values_;
};

struct Globals {
  std::size_t seed = 0;
  int jobs = 1;
  std::string out_dir = "out";
};

struct Context {
  const Globals& g;
  std::ostream& out;
  RunManifest manifest;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(g.out_dir) / name).string();
  }
  std::string read_input(const std::string& p) {
    std::string bytes = read_text_file(p);
    manifest.inputs.emplace_back(p, sha256_hex(bytes));
    return bytes;
  }
  void write_output(const std::string& name, std::string_view bytes) {
    write_text_file(path(name), bytes);
    manifest.outputs.push_back(name);
  }
  void finish() {
    write_text_file(path(manifest.command + ".manifest"), manifest.str());
  }
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }

template <class T>
T parse_tag(std::optional<T> v, std::string_view what, const std::string& tag) {
  if (!v) usage("unknown " + std::string(what) + " '" + tag + "'");
  return *v;
}

std::optional<Timestamp> optional_timestamp(const std::string& s, std::string_view what) {
  if (s.empty()) return std::nullopt;
  auto ts = parse_timestamp(s);
  if (!ts) usage(std::string(what) + ": cannot parse timestamp '" + s + "'");
  return ts;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::string_view rest = s;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view tok = rest.substr(0, comma);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      usage("seeds: bad seed '" + std::string(tok) + "'");
    seeds.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return seeds;
}

// Options shared by train and compare.
struct ModelFlags {
  std::string model = "seq2seq";
  std::size_t hidden = 64;
  std::string fc_activation = "identity";

  void add(OptionSet& o) {
    o.add("model", model, "model1 or seq2seq");
    o.add("hidden", hidden, "GRU units (encoder and decoder)");
    o.add("fc_activation", fc_activation, "identity, tanh or sigmoid");
  }
  ModelConfig config(const Dataset& d, Initializer init, std::uint64_t seed) const {
    ModelConfig mc;
    mc.kind = parse_tag(parse_model_kind(model), "model", model);
    mc.fc_activation = parse_tag(parse_activation(fc_activation), "activation", fc_activation);
    mc.fc_initializer = init;
    mc.hidden = mc.decoder_hidden = hidden;
    mc.training_window = d.windows.training_window;
    mc.predict_window = d.windows.predict_window;
    mc.seed = seed;
    return mc;
  }
};

struct TrainFlags {
  TrainConfig tc;
  std::string loss = "ssmape";

  void add(OptionSet& o) {
    o.add("epochs", tc.epochs, "training epochs");
    o.add("n_repeat", tc.n_repeat, "passes over the windows per epoch");
    o.add("eta", tc.eta, "SGD learning rate");
    o.add("epsilon", tc.epsilon, "SSMAPE smoothing");
    o.add("beta", tc.beta, "L2 activation penalty");
    o.add("asgd_start_epoch", tc.asgd_start_epoch, "first epoch of FC weight averaging");
    o.add("loss", loss, "ssmape or mae");
  }
  TrainConfig config(std::uint64_t seed) const {
    TrainConfig c = tc;
    c.loss = parse_tag(parse_loss(loss), "loss", loss);
    c.seed = seed;
    return c;
  }
};

struct DataFlags {
  std::string features;
  std::string windows;

  void add(OptionSet& o) {
    o.add("features", features, "feature matrix CSV from featurize")->required();
    o.add("windows", windows, "window index from featurize")->required();
  }
  Dataset load(Context& ctx) const {
    FeatureMatrix m = read_feature_csv(ctx.read_input(features), features);
    const KeyValues index = KeyValues::parse(ctx.read_input(windows));
    return dataset_from_files(std::move(m), index);
  }
};

// --- commands ---------------------------------------------------------------

struct SynthCmd {
  SyntheticOptions so;
  std::string start = "2015-01-01T00:30:00";

  void add(OptionSet& o) {
    o.add("days", so.days, "length in days");
    o.add("base_mw", so.base_mw, "mean demand");
    o.add("daily_mw", so.daily_mw, "daily amplitude");
    o.add("weekly_mw", so.weekly_mw, "weekly amplitude");
    o.add("annual_mw", so.annual_mw, "annual amplitude");
    o.add("noise", so.noise, "relative noise level");
    o.add("start", start, "first timestamp");
    o.add("region", so.region, "REGION column value");
  }
  void run(Context& ctx) {
    so.start = *optional_timestamp(start, "start");
    so.seed = ctx.g.seed;
    const LoadSeries s = synthetic_series(so);
    ctx.write_output("synthetic.csv", write_aemo_csv(s));
    ctx.out << "synth: " << s.size() << " half-hours\n";
  }
};

struct IngestCmd {
  std::vector<std::string> inputs;
  std::string region = "NSW1";
  std::size_t max_gap = kDefaultMaxGap;

  void add(OptionSet& o) {
    o.add("input", inputs, "AEMO CSV file (repeat or comma-separate)")
        ->required()
        ->delimiter(',');
    o.add("region", region, "keep rows of this REGION (empty keeps all)");
    o.add("max_gap", max_gap, "longest run of missing half-hours to interpolate");
  }
  void run(Context& ctx) {
    std::vector<LoadSeries> parts;
    for (const std::string& p : inputs) {
      const std::string text = ctx.read_input(p);
      parts.push_back(parse_aemo_csv(
          text, region.empty() ? std::nullopt : std::optional<std::string_view>(region), p));
    }
    const LoadSeries s = repair_gaps(merge_series(parts), max_gap);
    ctx.write_output("series.csv", write_series_csv(s));
    ctx.out << "ingest: " << s.size() << " half-hours from " << inputs.size() << " file(s)\n";
  }
};

struct FeaturizeCmd {
  std::string series;
  WindowOptions w;
  SplitOptions split;
  std::string train_end, val_end;

  void add(OptionSet& o) {
    o.add("series", series, "canonical series CSV from ingest")->required();
    o.add("training_window", w.training_window, "input window length (half-hours)");
    o.add("predict_window", w.predict_window, "forecast horizon (half-hours)");
    o.add("stride", w.stride, "offset between consecutive windows");
    o.add("train_fraction", split.train_fraction, "training share of the feature rows");
    o.add("val_fraction", split.val_fraction, "validation share of the feature rows");
    o.add("train_end", train_end, "first validation timestamp (overrides fraction)");
    o.add("val_end", val_end, "first test timestamp (overrides fraction)");
  }
  void run(Context& ctx) {
    if (w.training_window < 1 || w.predict_window < 1 || w.stride < 1)
      usage("training_window, predict_window and stride must be >= 1");
    if (!(split.train_fraction > 0.0) || !(split.val_fraction >= 0.0) ||
        split.train_fraction + split.val_fraction >= 1.0)
      usage("need train_fraction > 0, val_fraction >= 0 and their sum < 1");
    split.train_end = optional_timestamp(train_end, "train_end");
    split.val_end = optional_timestamp(val_end, "val_end");
    const LoadSeries s = read_series_csv(ctx.read_input(series), series);
    const Dataset d = prepare_dataset(s, split, w);
    if (d.train.empty()) {
      throw Error(ErrorKind::WindowTooLarge,
                  "training_window + predict_window = " +
                      std::to_string(w.training_window + w.predict_window) +
                      " exceeds the training rows");
    }
    ctx.write_output("features.csv", write_feature_csv(*d.matrix));
    ctx.write_output("windows.txt", window_index(d).str());
    ctx.write_output("windows.csv", write_window_csv(d));
    ctx.out << "featurize: " << d.matrix->rows() << " rows, windows train/val/test "
            << d.train.size() << "/" << d.val.size() << "/" << d.test.size() << "\n";
  }
};

struct TrainCmd {
  DataFlags data;
  ModelFlags model;
  TrainFlags train;
  std::string init = "zero";

  void add(OptionSet& o) {
    data.add(o);
    model.add(o);
    o.add("init", init, "FC initializer: zero, xavier_normal, xavier_uniform, "
                        "he_normal, he_uniform, identity");
    train.add(o);
  }
  int run(Context& ctx) {
    const Initializer fc_init = parse_tag(parse_initializer(init), "initializer", init);
    const Dataset d = data.load(ctx);
    const ModelConfig mc = model.config(d, fc_init, ctx.g.seed);
    const TrainConfig tc = train.config(ctx.g.seed);
    tc.validate();
    auto m = Model::create(mc);
    CheckpointMeta meta{d.scaler, d.autocorr, 0};
    ctx.write_output("checkpoint_step0.txt", write_checkpoint(*m, meta, false));

    VarianceTrace variance;
    TrainObserver obs;
    obs.variance = &variance;
    auto write_history = [&] {
      ctx.write_output("history.csv", write_loss_trace_csv(obs.step_loss));
      std::string epochs = "epoch,mean_loss\n";
      for (std::size_t e = 0; e < obs.epoch_loss.size(); ++e)
        epochs += std::to_string(e + 1) + "," + format_double(obs.epoch_loss[e]) + "\n";
      ctx.write_output("epoch_loss.csv", epochs);
      ctx.write_output("variance_trace.csv", write_variance_trace_csv(variance));
    };
    TrainedModel tm;
    try {
      tm = loadfc::train(std::move(m), d.train, d.scaler, tc, &obs);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NonFiniteLoss) {
        write_history();
        ctx.finish();
      }
      throw;
    }
    write_history();
    meta.step = obs.step_loss.size();
    ctx.write_output("checkpoint.txt", write_checkpoint(*tm.model, meta, true));
    if (!d.test.empty()) {
      const EvalReport r = evaluate_mape(*tm.model, d.test, d.scaler);
      ctx.write_output("test_mape.csv", write_mape_trace_csv(r));
      char buf[96];
      std::snprintf(buf, sizeof buf, "test MAPE %.4f%% (std %.4f) over %zu windows",
                    r.mean_mape, r.std_mape, r.per_window_mape.size());
      ctx.out << "train: " << meta.step << " steps, final epoch loss "
              << (tm.history.empty() ? "n/a" : format_double(tm.history.back())) << ", "
              << buf << "\n";
    }
    return 0;
  }
};

struct CompareCmd {
  DataFlags data;
  ModelFlags model;
  TrainFlags train;
  std::vector<std::string> inits = {"zero", "xavier_uniform", "he_normal", "identity"};
  std::string seeds;

  void add(OptionSet& o) {
    data.add(o);
    model.add(o);
    o.add("inits", inits, "FC initializers to compare")->delimiter(',');
    o.add("seeds", seeds, "comma-separated seeds (default: 5 seeds from --seed)");
    train.add(o);
  }
  int run(Context& ctx, KeyValues& options) {
    std::vector<Initializer> init_list;
    for (const std::string& t : inits)
      init_list.push_back(parse_tag(parse_initializer(t), "initializer", t));
    if (seeds.empty()) {
      for (std::uint64_t k = 0; k < 5; ++k)
        seeds += (k ? "," : "") + std::to_string(ctx.g.seed + k);
      options.set("seeds", seeds);
    }
    const std::vector<std::uint64_t> seed_list = parse_seed_list(seeds);
    const Dataset d = data.load(ctx);
    if (d.test.empty()) throw Error(ErrorKind::WindowTooLarge, "no test windows");
    const ModelConfig base = model.config(d, Initializer::Zero, 0);
    const ExperimentResult r =
        compare_initializers(d, base, train.config(0), init_list, seed_list, ctx.g.jobs);

    ctx.write_output("results.csv", write_results_csv(r));
    ctx.write_output("aggregate.csv", write_aggregate_csv(r));
    for (const ArmResult& arm : r.arms) {
      const std::string tag =
          std::string(to_string(arm.initializer)) + "_seed" + std::to_string(arm.seed);
      ctx.write_output("traces/loss_" + tag + ".csv", write_loss_trace_csv(arm.step_loss));
      if (arm.ok)
        ctx.write_output("traces/mape_" + tag + ".csv", write_mape_trace_csv(arm.report));
    }
    const std::string report = ordering_report(r);
    ctx.write_output("ordering.txt", report);
    ctx.out << report;

    const bool any_ok = std::any_of(r.arms.begin(), r.arms.end(),
                                    [](const ArmResult& a) { return a.ok; });
    return any_ok ? 0 : 3;
  }

  static std::string ordering_report(const ExperimentResult& r) {
    std::vector<AggregateRow> rows = r.aggregate();
    std::erase_if(rows, [](const AggregateRow& a) { return a.succeeded == 0; });
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.average_mape < b.average_mape;
    });
    std::string out = "rank,initializer,average_mape_pct,std_pct,arms_ok\n";
    char buf[160];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%s,%.4f,%.4f,%zu/%zu\n", i + 1,
                    std::string(to_string(rows[i].initializer)).c_str(),
                    rows[i].average_mape, rows[i].std_mape, rows[i].succeeded,
                    rows[i].attempted);
      out += buf;
    }
    const bool has_zero = std::any_of(rows.begin(), rows.end(), [](const auto& a) {
      return a.initializer == Initializer::Zero;
    });
    if (has_zero && rows.size() > 1) {
      out += rows.front().initializer == Initializer::Zero
                 ? "# zero initialization has the lowest mean MAPE\n"
                 : "# zero initialization does not have the lowest mean MAPE\n";
    }
    return out;
  }
};

struct ForecastCmd {
  std::string checkpoint;
  std::string series;
  std::size_t horizon = kDefaultPredictWindow;

  void add(OptionSet& o) {
    o.add("checkpoint", checkpoint, "checkpoint from train")->required();
    o.add("series", series, "canonical series CSV ending where the forecast starts")
        ->required();
    o.add("horizon", horizon, "half-hours to forecast");
  }
  void run(Context& ctx) {
    LoadedCheckpoint ck = read_checkpoint(ctx.read_input(checkpoint));
    const LoadSeries s = read_series_csv(ctx.read_input(series), series);
    const auto points = forecast(*ck.model, ck.meta.scaler, ck.meta.autocorr, s, horizon);
    ctx.write_output("forecast.csv", write_forecast_csv(points));
    ctx.out << "forecast: " << points.size() << " half-hours from "
            << points.front().timestamp.iso() << "\n";
  }
};

std::vector<std::string> replay_args(const RunManifest& m, const std::string& out_dir) {
  std::vector<std::string> args = {"loadfc"};
  for (const auto& [k, v] : m.globals.items()) {
    args.push_back("--" + k);
    args.push_back(k == "out-dir" && !out_dir.empty() ? out_dir : v);
  }
  args.push_back(m.command);
  for (const auto& [k, v] : m.options.items()) {
    if (v.empty()) continue;
    args.push_back("--" + k);
    args.push_back(v);
  }
  return args;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GRU load forecasting with zero-initialized output layers", "loadfc"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "seed for model initialization and synthetic data");
  app.add_option("--jobs", g.jobs, "worker threads for compare")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory for outputs and the run manifest");

  struct Entry {
    CLI::App* app;
    std::unique_ptr<OptionSet> opts;
  };
  std::vector<Entry> entries;
  auto sub = [&](const char* name, const char* help) -> OptionSet& {
    CLI::App* s = app.add_subcommand(name, help);
    entries.push_back({s, std::make_unique<OptionSet>(s)});
    return *entries.back().opts;
  };
  SynthCmd synth;
  synth.add(sub("synth", "write a synthetic AEMO-format demand file"));
  IngestCmd ingest;
  ingest.add(sub("ingest", "parse AEMO CSVs into a canonical series"));
  FeaturizeCmd featurize;
  featurize.add(sub("featurize", "build the feature matrix and windows"));
  TrainCmd train;
  train.add(sub("train", "train one model"));
  CompareCmd compare;
  compare.add(sub("compare", "compare FC initializers over several seeds"));
  ForecastCmd fc;
  fc.add(sub("forecast", "forecast from a checkpoint"));
  std::string manifest_path, replay_out;
  CLI::App* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("--manifest", manifest_path, "manifest file")->required();
  replay->add_option("--to", replay_out, "write outputs here instead of the recorded out-dir");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (replay->parsed()) {
      const RunManifest m = RunManifest::parse(read_text_file(manifest_path));
      for (const auto& [path, digest] : m.inputs) {
        if (sha256_hex(read_text_file(path)) != digest)
          throw Error(ErrorKind::SchemaMismatch, "input changed since the run: " + path);
      }
      const auto rerun = replay_args(m, replay_out);
      return run_cli(rerun, out, err);
    }

    for (const Entry& e : entries) {
      if (!e.app->parsed()) continue;
      Context ctx{g, out, {}};
      ctx.manifest.command = e.app->get_name();
      ctx.manifest.globals.set("seed", std::to_string(g.seed));
      ctx.manifest.globals.set("jobs", std::to_string(g.jobs));
      ctx.manifest.globals.set("out-dir", g.out_dir);
      ctx.manifest.options = e.opts->resolved();
      int code = 0;
      const std::string& name = ctx.manifest.command;
      if (name == "synth") synth.run(ctx);
      if (name == "ingest") ingest.run(ctx);
      if (name == "featurize") featurize.run(ctx);
      if (name == "train") code = train.run(ctx);
      if (name == "compare") code = compare.run(ctx, ctx.manifest.options);
      if (name == "forecast") fc.run(ctx);
      ctx.finish();
      return code;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace loadfc
