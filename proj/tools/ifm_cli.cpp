// ifm: encode heartbeats as GAF/RP/MTF images, build fused tensor stores,
// train and evaluate the reference softmax classifier.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ifm/pipeline.hpp"
#include "ifm/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ifm;

namespace {

// Flags shared by every subcommand. Only flags given on the command line
// override values from --config.
struct SharedFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t size = encoders::kDefaultFuseSize;
  int bins = encoders::kDefaultBins;
  double eps_fraction = encoders::kDefaultEpsFraction;
  std::string rp_mode = "binary";
  std::string mtf_layout = "field";
  std::string smote = "off";
  std::string channels = "fused";

  std::vector<std::pair<CLI::Option*, std::function<void(pipeline::PipelineConfig&)>>> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON pipeline config");
    auto flag = [&](CLI::Option* opt, std::function<void(pipeline::PipelineConfig&)> apply) {
      overrides.emplace_back(opt, std::move(apply));
    };
    flag(app->add_option("--seed", seed, "random seed"), [this](auto& c) { c.seed = seed; });
    flag(app->add_option("--size", size, "fused image side (default 227)")->check(CLI::PositiveNumber),
         [this](auto& c) { c.encoder.size = size; });
    flag(app->add_option("--Q", bins, "MTF quantile bins (default 10)"), [this](auto& c) { c.encoder.bins = bins; });
    flag(app->add_option("--eps-fraction", eps_fraction, "RP threshold as a fraction of the range (default 0.1)"),
         [this](auto& c) { c.encoder.eps_fraction = eps_fraction; });
    flag(app->add_option("--rp-mode", rp_mode, "binary|distance"),
         [this](auto& c) { c.encoder.rp_mode = pipeline::parse_rp_mode(rp_mode); });
    flag(app->add_option("--mtf-layout", mtf_layout, "field|matrix"),
         [this](auto& c) { c.encoder.mtf_layout = pipeline::parse_mtf_layout(mtf_layout); });
    flag(app->add_option("--smote", smote, "off|balance|targets=<label>:<count>,..."),
         [this](auto& c) {
           const int k = c.smote.k_neighbors;
           c.smote = pipeline::parse_smote(smote);
           c.smote.k_neighbors = k;
         });
    app->add_option("--channels", channels, "gaf|rp|mtf|fused (train/eval also accept all)");
  }

  pipeline::PipelineConfig resolve() const {
    pipeline::PipelineConfig c = config_path.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(config_path);
    for (const auto& [opt, apply] : overrides)
      if (opt->count() > 0) apply(c);
    c.train.seed = c.seed;
    return c;
  }

  std::vector<pipeline::Channels> channel_list() const {
    if (channels == "all") return {std::begin(pipeline::kAblationOrder), std::end(pipeline::kAblationOrder)};
    return {pipeline::parse_channels(channels)};
  }
};

encoders::TimeSeries read_series(const std::string& input, std::size_t row, const std::string& inline_series) {
  if (!inline_series.empty()) {
    const auto ds = dataset::parse_csv(inline_series + ",0\n", dataset::Split::Test);
    return encoders::TimeSeries(std::vector<double>(ds.beats[0].samples().begin(), ds.beats[0].samples().end()));
  }
  const auto ds = dataset::load_csv(input, dataset::Split::Test);
  if (row >= ds.size()) {
    throw std::invalid_argument("row " + std::to_string(row) + " out of range; " + input + " has " +
                                std::to_string(ds.size()) + " beats");
  }
  return ds.beats[row];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-series to image encoding and fused-image classification"};
  app.require_subcommand(1);

  // encode
  SharedFlags encode_flags;
  std::string encode_input, encode_series, encode_out = ".";
  std::size_t encode_row = 0;
  bool encode_fuse = false;
  auto* encode = app.add_subcommand("encode", "write gaf.png, rp.png, mtf.png (and fused.png) for one beat");
  encode_flags.attach(encode);
  encode->add_option("--input", encode_input, "beat CSV");
  encode->add_option("--row", encode_row, "0-based row of --input");
  encode->add_option("--series", encode_series, "inline comma-separated samples");
  encode->add_option("--out", encode_out, "output directory");
  encode->add_flag("--fuse", encode_fuse, "also write the fused RGB image");

  // build
  SharedFlags build_flags;
  std::string build_train, build_test, build_out, build_classes, build_only, build_save_config;
  int build_k = 0;
  auto* build = app.add_subcommand("build", "SMOTE, encode and fuse both splits into tensor stores");
  build_flags.attach(build);
  build->add_option("--train", build_train, "training CSV");
  build->add_option("--test", build_test, "test CSV");
  build->add_option("--out", build_out, "output directory");
  build->add_option("--classes", build_classes, "auto|mitbih|ptb|<label>:<name>,...");
  build->add_option("--only-channel", build_only, "keep a single channel: gaf|rp|mtf");
  build->add_option("--k-neighbors", build_k, "SMOTE neighbours (default 5)");
  build->add_option("--save-config", build_save_config, "write the resolved config as JSON");

  // train
  SharedFlags train_flags;
  std::string train_stores, train_models;
  std::optional<double> lr, momentum, l2, val_fraction;
  std::optional<std::size_t> batch, epochs, patience;
  auto* train = app.add_subcommand("train", "train the softmax classifier on a built train store");
  train_flags.attach(train);
  train->add_option("--stores", train_stores, "directory written by build")->required();
  train->add_option("--model-dir", train_models, "checkpoint directory (default: --stores)");
  train->add_option("--lr", lr, "learning rate (default 0.01)");
  train->add_option("--momentum", momentum, "momentum (default 0.9)");
  train->add_option("--l2", l2, "L2 penalty (default 0.004)");
  train->add_option("--batch-size", batch, "mini-batch size (default 64)");
  train->add_option("--epochs", epochs, "maximum epochs (default 50)");
  train->add_option("--patience", patience, "early-stop patience (default 5)");
  train->add_option("--val-fraction", val_fraction, "stratified validation share (default 0.1)");

  // eval
  SharedFlags eval_flags;
  std::string eval_stores, eval_models, eval_report;
  auto* eval = app.add_subcommand("eval", "evaluate checkpoints on the test store");
  eval_flags.attach(eval);
  eval->add_option("--stores", eval_stores, "directory written by build")->required();
  eval->add_option("--model-dir", eval_models, "checkpoint directory (default: --stores)");
  eval->add_option("--report", eval_report, "write the JSON report here");

  // inspect
  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "summarise a tensor store, checkpoint or manifest");
  inspect->add_option("path", inspect_path, "store stem, .json header or build directory")->required();

  // synth
  synthetic::CorpusSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic three-class beat CSV");
  synth->add_option("--out", synth_out, "CSV path")->required();
  synth->add_option("--per-class", synth_spec.per_class, "beats per class (default 150)");
  synth->add_option("--length", synth_spec.length, "samples per beat (default 187)");
  synth->add_option("--noise", synth_spec.noise, "noise standard deviation (default 0.1)");
  synth->add_option("--seed", synth_spec.seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) {
      auto config = encode_flags.resolve();
      if (encode_input.empty() && encode_series.empty()) throw std::invalid_argument("give --input or --series");
      const auto series = read_series(encode_input, encode_row, encode_series);
      pipeline::encode_to_pngs(series, config.encoder, encode_out, encode_fuse);
    } else if (*build) {
      auto config = build_flags.resolve();
      if (!build_train.empty()) config.train_csv = build_train;
      if (!build_test.empty()) config.test_csv = build_test;
      if (!build_out.empty()) config.out_dir = build_out;
      if (!build_classes.empty()) config.classes = build_classes;
      if (!build_only.empty()) config.only_channel = pipeline::parse_channels(build_only);
      if (build_k > 0) config.smote.k_neighbors = build_k;
      if (config.train_csv.empty() || config.test_csv.empty() || config.out_dir.empty()) {
        throw std::invalid_argument("build needs --train, --test and --out (or a config providing them)");
      }
      if (!build_save_config.empty()) pipeline::save_config(build_save_config, config);
      pipeline::cmd_build(config);
      std::cout << pipeline::inspect(fs::path(config.out_dir));
    } else if (*train) {
      auto config = train_flags.resolve();
      if (lr) config.train.learning_rate = *lr;
      if (momentum) config.train.momentum = *momentum;
      if (l2) config.train.l2 = *l2;
      if (batch) config.train.batch_size = *batch;
      if (epochs) config.train.max_epochs = *epochs;
      if (patience) config.train.patience = *patience;
      if (val_fraction) config.val_fraction = *val_fraction;
      const fs::path models = train_models.empty() ? fs::path(train_stores) : fs::path(train_models);
      for (auto channels : train_flags.channel_list()) {
        pipeline::cmd_train(config, train_stores, models, channels);
        std::cout << pipeline::inspect(pipeline::checkpoint_stem(models, channels));
      }
    } else if (*eval) {
      const fs::path models = eval_models.empty() ? fs::path(eval_stores) : fs::path(eval_models);
      const auto names = io::read_store(fs::path(eval_stores) / "test").class_names;
      std::vector<metrics::AblationRow> rows;
      pipeline::Json reports = pipeline::Json::array();
      for (auto channels : eval_flags.channel_list()) {
        const auto report = pipeline::cmd_eval(eval_stores, models, channels);
        rows.emplace_back(pipeline::table_name(channels), report);
        reports.push_back(pipeline::report_to_json(report, names, pipeline::to_string(channels)));
      }
      std::cout << metrics::render_table(rows);
      if (!eval_report.empty()) {
        io::write_text(eval_report, (reports.size() == 1 ? reports[0] : reports).dump(2) + "\n");
      }
    } else if (*inspect) {
      std::cout << pipeline::inspect(inspect_path);
    } else if (*synth) {
      synthetic::write_csv(synth_out, synthetic::corpus(synth_spec));
    }
  } catch (const std::exception& e) {
    std::cerr << "ifm: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
