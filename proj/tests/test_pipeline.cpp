#include <cmath>
#include <random>

#include "doctest.h"
#include "ifm/pipeline.hpp"
#include "ifm/synthetic.hpp"
#include "temp_dir.hpp"

using namespace ifm;
using namespace ifm::pipeline;

namespace {

dataset::BeatDataset two_class(std::size_t n0, std::size_t n1, std::uint64_t seed) {
  synthetic::CorpusSpec spec;
  spec.per_class = std::max(n0, n1);
  spec.length = 24;
  spec.seed = seed;
  const auto all = synthetic::corpus(spec);
  dataset::BeatDataset out;
  out.class_names = {{0, "sine"}, {1, "square"}};
  out.beat_length = spec.length;
  std::size_t have0 = 0, have1 = 0;
  for (const auto& b : all.beats) {
    if (b.label() == 0 && have0 < n0) {
      out.beats.push_back(b);
      ++have0;
    } else if (b.label() == 1 && have1 < n1) {
      out.beats.push_back(b);
      ++have1;
    }
  }
  return out;
}

PipelineConfig toy_config(const TempDir& dir, const std::string& out = "out") {
  PipelineConfig c;
  c.encoder.size = 8;
  c.train_csv = (dir.path() / "train.csv").string();
  c.test_csv = (dir.path() / "test.csv").string();
  c.out_dir = (dir.path() / out).string();
  c.seed = 5;
  c.train.max_epochs = 10;
  c.train.seed = 5;
  return c;
}

// Four classes: bit 0 lives in channel 0, bit 1 in channel 1, channel 2 is noise.
io::TensorStore split_signal_store(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.3f);
  io::TensorStore s;
  s.shape = {4 * per_class, 3, 2, 2};
  s.class_names = {{0, "00"}, {1, "01"}, {2, "10"}, {3, "11"}};
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int label = 0; label < 4; ++label) {
      for (int c = 0; c < 3; ++c) {
        const float mean = c == 0 ? ((label & 1) ? 1.0f : -1.0f) : c == 1 ? ((label & 2) ? 1.0f : -1.0f) : 0.0f;
        for (int p = 0; p < 4; ++p) s.data.push_back(mean + noise(rng));
      }
      s.labels.push_back(label);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("pipeline config round-trips through JSON") {
  PipelineConfig c;
  c.encoder = {4, 0.25, encoders::RpMode::Distance, encoders::MtfLayout::Matrix, 64};
  c.smote = parse_smote("targets=0:500,3:1200");
  c.smote.k_neighbors = 3;
  c.train.learning_rate = 0.0123456789012345;
  c.train.l2 = 1e-7;
  c.train.batch_size = 17;
  c.seed = 18446744073709551557ULL;
  c.train.seed = c.seed;
  c.only_channel = Channels::Mtf;
  c.val_fraction = 0.15;
  c.classes = "mitbih";
  c.train_csv = "a.csv";
  c.test_csv = "b.csv";
  c.out_dir = "o";
  CHECK(config_from_json(Json::parse(to_json(c).dump())) == c);

  TempDir dir;
  save_config(dir.path() / "c.json", c);
  CHECK(load_config(dir.path() / "c.json") == c);

  CHECK_THROWS_AS(config_from_json(Json{{"bogus", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(Json{{"encoder", Json{{"Qx", 1}}}}), std::invalid_argument);
}

TEST_CASE("flag parsers") {
  CHECK(parse_smote("off").mode == SmoteSettings::Mode::Off);
  CHECK(parse_smote("balance").mode == SmoteSettings::Mode::Balance);
  const auto t = parse_smote("targets=0:50,1:50");
  CHECK(t.targets == std::map<int, std::size_t>{{0, 50}, {1, 50}});
  CHECK(to_string(t) == "targets=0:50,1:50");
  CHECK_THROWS_AS(parse_smote("targets=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_smote("targets=a:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_smote("sometimes"), std::invalid_argument);
  CHECK(parse_channels("rp") == Channels::Rp);
  CHECK_THROWS_AS(parse_channels("rgb"), std::invalid_argument);
  CHECK(!resolve_classes("auto"));
  CHECK(resolve_classes("mitbih")->size() == 5);
  CHECK(resolve_classes("ptb")->at(1) == "MI");
  CHECK(*resolve_classes("0:a,2:b") == io::ClassNames{{0, "a"}, {2, "b"}});
  CHECK(table_name(Channels::Fused) == "IFM");
}

TEST_CASE("build without SMOTE passes counts through") {
  TempDir dir;
  synthetic::write_csv(dir.path() / "train.csv", two_class(20, 20, 1));
  synthetic::write_csv(dir.path() / "test.csv", two_class(20, 20, 2));
  const auto cfg = toy_config(dir);
  const auto manifest = cmd_build(cfg);
  CHECK(manifest["inputs"]["train"]["counts"] == Json{{"0", 20}, {"1", 20}});
  CHECK(manifest["stores"]["train"]["counts"] == Json{{"0", 20}, {"1", 20}});
  CHECK(manifest["stores"]["test"]["shape"] == Json{40, 3, 8, 8});
  const auto store = io::read_store(dir.path() / "out" / "train");
  CHECK(store.count() == 40);
  CHECK(manifest["stores"]["train"]["sha256"] == io::sha256_file(dir.path() / "out" / "train.bin"));
}

TEST_CASE("build with SMOTE targets and deterministic rebuilds") {
  TempDir dir;
  synthetic::write_csv(dir.path() / "train.csv", two_class(50, 20, 3));
  synthetic::write_csv(dir.path() / "test.csv", two_class(10, 10, 4));
  auto cfg = toy_config(dir, "a");
  cfg.smote = parse_smote("targets=0:50,1:50");
  const auto a = cmd_build(cfg);
  CHECK(io::read_store(dir.path() / "a" / "train").count() == 100);
  CHECK(a["inputs"]["train"]["rows"] == 70);
  CHECK(a["stores"]["train"]["counts"] == Json{{"0", 50}, {"1", 50}});

  cfg.out_dir = (dir.path() / "b").string();
  const auto b = cmd_build(cfg);
  CHECK(a == b);
  CHECK(io::read_text(dir.path() / "a" / "manifest.json") == io::read_text(dir.path() / "b" / "manifest.json"));

  cfg.out_dir = (dir.path() / "c").string();
  cfg.seed = 6;
  const auto c = cmd_build(cfg);
  CHECK(c["stores"]["train"]["sha256"] != a["stores"]["train"]["sha256"]);
  CHECK(c["stores"]["test"]["sha256"] == a["stores"]["test"]["sha256"]);
}

TEST_CASE("build errors name the stage") {
  TempDir dir;
  synthetic::write_csv(dir.path() / "train.csv", two_class(5, 5, 1));
  io::write_text(dir.path() / "test.csv", "1,2,3,0\n1,2,0\n");
  auto cfg = toy_config(dir);
  try {
    cmd_build(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "load");
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  synthetic::write_csv(dir.path() / "test.csv", two_class(5, 5, 2));
  cfg.encoder.eps_fraction = 3.0;
  try {
    cmd_build(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "encode train");
    CHECK(std::string(e.what()).find("beat 0") != std::string::npos);
  }

  cfg.encoder.eps_fraction = 0.1;
  cfg.smote = parse_smote("targets=0:3,1:5");
  CHECK_THROWS_WITH(cmd_build(cfg), doctest::Contains("smote:"));
}

TEST_CASE("only-channel builds zero the other channels") {
  TempDir dir;
  synthetic::write_csv(dir.path() / "train.csv", two_class(4, 4, 1));
  synthetic::write_csv(dir.path() / "test.csv", two_class(4, 4, 2));
  auto cfg = toy_config(dir);
  cfg.only_channel = Channels::Rp;
  cmd_build(cfg);
  const auto s = io::read_store(dir.path() / "out" / "train");
  for (std::size_t i = 0; i < s.count(); ++i) {
    const auto slice = s.slice(i);
    for (std::size_t p = 0; p < 64; ++p) {
      CHECK(slice[p] == 0.0f);
      CHECK(slice[128 + p] == 0.0f);
    }
    CHECK(slice[64] == 1.0f);  // RP diagonal
  }
}

TEST_CASE("stratified validation split") {
  const auto s = split_signal_store(25, 1);
  const auto [fit, val] = split_validation(s, 0.1, 9);
  CHECK(fit.count() + val.count() == s.count());
  std::map<int, int> per;
  for (int l : val.labels) ++per[l];
  for (int c = 0; c < 4; ++c) CHECK(per[c] == 3);  // round(2.5) away from zero
  const auto again = split_validation(s, 0.1, 9);
  CHECK(again.second == val);
  CHECK(split_validation(s, 0.1, 10).second != val);
  CHECK(split_validation(s, 0.0, 9).second.count() == 0);
}

TEST_CASE("checkpoint round trip") {
  TempDir dir;
  Checkpoint cp;
  cp.model = classifier::SoftmaxModel::zeros(3, 4, 2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (auto& w : cp.model.weights.values()) w = n(rng);
  cp.model.bias = {n(rng), n(rng), n(rng)};
  cp.class_names = {{0, "a"}, {1, "b"}, {2, "c"}};
  cp.channels = Channels::Gaf;
  cp.train.seed = 77;
  cp.history = {{1.5, 1.25}, {0.1 + 0.2, 0.3}};
  cp.best_epoch = 2;
  save_checkpoint(dir.path() / "m", cp);
  const auto back = load_checkpoint(dir.path() / "m");
  CHECK(back.model == cp.model);
  CHECK(back.class_names == cp.class_names);
  CHECK(back.channels == Channels::Gaf);
  CHECK(back.train == cp.train);
  CHECK(back.best_epoch == 2);
  CHECK(back.history[1].train_loss == 0.1 + 0.2);
}

TEST_CASE("fused evaluation beats single channels when the signal is split") {
  TempDir dir;
  io::write_store(dir.path() / "train", split_signal_store(60, 1));
  io::write_store(dir.path() / "test", split_signal_store(30, 2));
  PipelineConfig cfg;
  cfg.train.max_epochs = 40;
  cfg.train.learning_rate = 0.05;
  cfg.seed = 3;
  std::map<Channels, double> acc;
  for (Channels ch : kAblationOrder) {
    cmd_train(cfg, dir.path(), dir.path(), ch);
    acc[ch] = cmd_eval(dir.path(), dir.path(), ch).accuracy;
  }
  CHECK(acc[Channels::Fused] > 0.95);
  CHECK(acc[Channels::Gaf] < 0.6);
  CHECK(acc[Channels::Rp] < 0.6);
  CHECK(acc[Channels::Mtf] < 0.4);
  CHECK(acc[Channels::Fused] >= std::max({acc[Channels::Gaf], acc[Channels::Rp], acc[Channels::Mtf]}));

  // Evaluating the same checkpoint twice is pure.
  CHECK(cmd_eval(dir.path(), dir.path(), Channels::Fused) == cmd_eval(dir.path(), dir.path(), Channels::Fused));
  const auto text = report_to_json(cmd_eval(dir.path(), dir.path(), Channels::Rp), {}, "rp").dump();
  CHECK(text == report_to_json(cmd_eval(dir.path(), dir.path(), Channels::Rp), {}, "rp").dump());
}

TEST_CASE("eval falls back to the fused checkpoint with zeroed channels") {
  TempDir dir;
  io::write_store(dir.path() / "train", split_signal_store(20, 1));
  io::write_store(dir.path() / "test", split_signal_store(10, 2));
  PipelineConfig cfg;
  cfg.train.max_epochs = 5;
  cmd_train(cfg, dir.path(), dir.path(), Channels::Fused);
  CHECK(!std::filesystem::exists(io::header_path(checkpoint_stem(dir.path(), Channels::Gaf))));
  const auto r = cmd_eval(dir.path(), dir.path(), Channels::Gaf);
  CHECK(r.total == 40);

  io::TensorStore wrong = split_signal_store(2, 3);
  wrong.shape[3] = 1;
  wrong.data.resize(wrong.count() * 6);
  io::write_store(dir.path() / "test", wrong);
  CHECK_THROWS_WITH(cmd_eval(dir.path(), dir.path(), Channels::Fused), doctest::Contains("dimension"));
}

TEST_CASE("encode writes grayscale and fused PNGs") {
  TempDir dir;
  std::vector<double> beat(187);
  for (std::size_t i = 0; i < beat.size(); ++i) beat[i] = std::sin(0.07 * static_cast<double>(i)) + 0.001 * i;
  const encoders::TimeSeries series(beat);
  encoders::EncoderConfig cfg;
  encode_to_pngs(series, cfg, dir.path() / "field", false);
  CHECK(io::read_png(dir.path() / "field" / "gaf.png").width == 187);
  CHECK(io::read_png(dir.path() / "field" / "rp.png").height == 187);
  CHECK(io::read_png(dir.path() / "field" / "mtf.png").width == 187);
  CHECK(!std::filesystem::exists(dir.path() / "field" / "fused.png"));

  cfg.mtf_layout = encoders::MtfLayout::Matrix;
  cfg.bins = 10;
  encode_to_pngs(series, cfg, dir.path() / "matrix", true);
  const auto mtf = io::read_png(dir.path() / "matrix" / "mtf.png");
  CHECK(mtf.width == 10);
  CHECK(mtf.height == 10);
  const auto fused = io::read_png(dir.path() / "matrix" / "fused.png");
  CHECK(fused.width == 227);
  CHECK(fused.height == 227);
  CHECK(fused.channels == 3);
}

TEST_CASE("inspect recognises stores, checkpoints and manifests") {
  TempDir dir;
  synthetic::write_csv(dir.path() / "train.csv", two_class(6, 6, 1));
  synthetic::write_csv(dir.path() / "test.csv", two_class(3, 3, 2));
  const auto cfg = toy_config(dir);
  cmd_build(cfg);
  const fs::path out(cfg.out_dir);
  CHECK(inspect(out / "train").find("tensor store") == 0);
  CHECK(inspect(out / "train.json").find("(verified)") != std::string::npos);
  CHECK(inspect(out).find("manifest") == 0);
  cmd_train(cfg, out, out, Channels::Fused);
  CHECK(inspect(out / "model_fused").find("checkpoint") == 0);
  CHECK_THROWS(inspect(dir.path() / "train.csv"));
}
