#include "ifm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ifm/random.hpp"

namespace ifm::pipeline {

namespace {

constexpr const char* kManifestFormat = "ifm-manifest";
constexpr const char* kCheckpointFormat = "ifm-checkpoint";
constexpr std::uint64_t kValidationStream = 0x76616c;

template <typename T>
T parse_int(std::string_view text, const std::string& what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad " + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

Json class_names_json(const io::ClassNames& names) {
  Json j = Json::object();
  for (const auto& [id, name] : names) j[std::to_string(id)] = name;
  return j;
}

io::ClassNames class_names_from_json(const Json& j) {
  io::ClassNames names;
  for (const auto& [key, value] : j.items()) names[std::stoi(key)] = value.get<std::string>();
  return names;
}

Json counts_json(const std::map<int, std::size_t>& counts) {
  Json j = Json::object();
  for (const auto& [id, n] : counts) j[std::to_string(id)] = n;
  return j;
}

Json train_json(const classifier::TrainConfig& t) {
  return Json{{"learning_rate", t.learning_rate}, {"momentum", t.momentum},
              {"l2", t.l2},                       {"batch_size", t.batch_size},
              {"max_epochs", t.max_epochs},       {"patience", t.patience}};
}

classifier::TrainConfig train_from_json(const Json& j, classifier::TrainConfig t) {
  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate") t.learning_rate = value.get<double>();
    else if (key == "momentum") t.momentum = value.get<double>();
    else if (key == "l2") t.l2 = value.get<double>();
    else if (key == "batch_size") t.batch_size = value.get<std::size_t>();
    else if (key == "max_epochs") t.max_epochs = value.get<std::size_t>();
    else if (key == "patience") t.patience = value.get<std::size_t>();
    else throw std::invalid_argument("unknown train setting '" + key + "'");
  }
  return t;
}

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

Json store_summary(const io::TensorStore& store, const std::string& checksum, const fs::path& stem) {
  std::map<int, std::size_t> counts;
  for (const auto& [id, name] : store.class_names) counts[id] = 0;
  for (int label : store.labels) ++counts[label];
  return Json{{"file", io::bin_path(stem).filename().string()},
              {"shape", store.shape},
              {"counts", counts_json(counts)},
              {"sha256", checksum},
              {"header_sha256", io::sha256_file(io::header_path(stem))}};
}

std::size_t class_count(const io::ClassNames& names) {
  if (names.empty()) throw std::invalid_argument("no classes defined");
  if (names.begin()->first < 0) throw std::invalid_argument("class ids must be non-negative");
  return static_cast<std::size_t>(names.rbegin()->first) + 1;
}

const char* smote_mode_name(SmoteSettings::Mode mode) {
  switch (mode) {
    case SmoteSettings::Mode::Off: return "off";
    case SmoteSettings::Mode::Balance: return "balance";
    case SmoteSettings::Mode::Targets: return "targets";
  }
  return "?";
}

Json read_json(const fs::path& path) { return Json::parse(io::read_text(path)); }

fs::path strip_extension(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".json" || ext == ".bin") return path.parent_path() / path.stem();
  return path;
}

}  // namespace

std::string to_string(Channels channels) {
  switch (channels) {
    case Channels::Gaf: return "gaf";
    case Channels::Rp: return "rp";
    case Channels::Mtf: return "mtf";
    case Channels::Fused: return "fused";
  }
  return "?";
}

Channels parse_channels(const std::string& text) {
  for (Channels c : kAblationOrder)
    if (text == to_string(c)) return c;
  throw std::invalid_argument("unknown channel selection '" + text + "' (gaf|rp|mtf|fused)");
}

std::string table_name(Channels channels) {
  switch (channels) {
    case Channels::Gaf: return "GAF";
    case Channels::Rp: return "RP";
    case Channels::Mtf: return "MTF";
    case Channels::Fused: return "IFM";
  }
  return "?";
}

void mask_channels(io::TensorStore& store, Channels keep) {
  if (keep == Channels::Fused) return;
  if (store.shape[1] != 3) throw std::invalid_argument("channel masking needs a 3-channel store");
  const auto kept = static_cast<std::size_t>(keep);
  const std::size_t plane = store.shape[2] * store.shape[3];
  for (std::size_t i = 0; i < store.count(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (c == kept) continue;
      auto first = store.data.begin() + static_cast<std::ptrdiff_t>((i * 3 + c) * plane);
      std::fill(first, first + static_cast<std::ptrdiff_t>(plane), 0.0f);
    }
  }
}

std::string to_string(encoders::RpMode mode) {
  return mode == encoders::RpMode::Binary ? "binary" : "distance";
}

encoders::RpMode parse_rp_mode(const std::string& text) {
  if (text == "binary") return encoders::RpMode::Binary;
  if (text == "distance") return encoders::RpMode::Distance;
  throw std::invalid_argument("unknown rp mode '" + text + "' (binary|distance)");
}

std::string to_string(encoders::MtfLayout layout) {
  return layout == encoders::MtfLayout::Field ? "field" : "matrix";
}

encoders::MtfLayout parse_mtf_layout(const std::string& text) {
  if (text == "field") return encoders::MtfLayout::Field;
  if (text == "matrix") return encoders::MtfLayout::Matrix;
  throw std::invalid_argument("unknown mtf layout '" + text + "' (field|matrix)");
}

SmoteSettings parse_smote(const std::string& text) {
  SmoteSettings s;
  if (text == "off") return s;
  if (text == "balance") {
    s.mode = SmoteSettings::Mode::Balance;
    return s;
  }
  const std::string prefix = "targets=";
  if (text.rfind(prefix, 0) != 0) {
    throw std::invalid_argument("unknown smote setting '" + text + "' (off|balance|targets=<spec>)");
  }
  s.mode = SmoteSettings::Mode::Targets;
  for (const auto& item : split(text.substr(prefix.size()), ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("smote target '" + item + "' needs <label>:<count>");
    const int label = parse_int<int>(std::string_view(item).substr(0, colon), "class label");
    s.targets[label] = parse_int<std::size_t>(std::string_view(item).substr(colon + 1), "target count");
  }
  if (s.targets.empty()) throw std::invalid_argument("smote targets list is empty");
  return s;
}

std::string to_string(const SmoteSettings& smote) {
  switch (smote.mode) {
    case SmoteSettings::Mode::Off: return "off";
    case SmoteSettings::Mode::Balance: return "balance";
    case SmoteSettings::Mode::Targets: break;
  }
  std::string out = "targets=";
  bool first = true;
  for (const auto& [label, count] : smote.targets) {
    if (!first) out += ',';
    out += std::to_string(label) + ':' + std::to_string(count);
    first = false;
  }
  return out;
}

std::optional<io::ClassNames> resolve_classes(const std::string& spec) {
  if (spec == "auto") return std::nullopt;
  if (spec == "mitbih") return dataset::mitbih_classes();
  if (spec == "ptb") return dataset::ptb_classes();
  io::ClassNames names;
  for (const auto& item : split(spec, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("class entry '" + item + "' needs <label>:<name>");
    names[parse_int<int>(std::string_view(item).substr(0, colon), "class label")] = item.substr(colon + 1);
  }
  if (names.empty()) throw std::invalid_argument("empty class list");
  return names;
}

Json to_json(const PipelineConfig& c, bool include_paths) {
  Json j;
  j["encoder"] = Json{{"Q", c.encoder.bins},
                      {"eps_fraction", c.encoder.eps_fraction},
                      {"rp_mode", to_string(c.encoder.rp_mode)},
                      {"mtf_layout", to_string(c.encoder.mtf_layout)},
                      {"size", c.encoder.size}};
  Json targets = Json::object();
  for (const auto& [label, n] : c.smote.targets) targets[std::to_string(label)] = n;
  j["smote"] = Json{{"mode", smote_mode_name(c.smote.mode)},
                    {"targets", targets},
                    {"k_neighbors", c.smote.k_neighbors}};
  j["train"] = train_json(c.train);
  j["seed"] = c.seed;
  j["only_channel"] = c.only_channel ? Json(to_string(*c.only_channel)) : Json(nullptr);
  j["val_fraction"] = c.val_fraction;
  j["classes"] = c.classes;
  if (include_paths) {
    j["train_csv"] = c.train_csv;
    j["test_csv"] = c.test_csv;
    j["out_dir"] = c.out_dir;
  }
  return j;
}

PipelineConfig config_from_json(const Json& j) {
  PipelineConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "encoder") {
      for (const auto& [k, v] : value.items()) {
        if (k == "Q") c.encoder.bins = v.get<int>();
        else if (k == "eps_fraction") c.encoder.eps_fraction = v.get<double>();
        else if (k == "rp_mode") c.encoder.rp_mode = parse_rp_mode(v.get<std::string>());
        else if (k == "mtf_layout") c.encoder.mtf_layout = parse_mtf_layout(v.get<std::string>());
        else if (k == "size") c.encoder.size = v.get<std::size_t>();
        else throw std::invalid_argument("unknown encoder setting '" + k + "'");
      }
    } else if (key == "smote") {
      for (const auto& [k, v] : value.items()) {
        if (k == "mode") {
          const auto mode = v.get<std::string>();
          if (mode == "off") c.smote.mode = SmoteSettings::Mode::Off;
          else if (mode == "balance") c.smote.mode = SmoteSettings::Mode::Balance;
          else if (mode == "targets") c.smote.mode = SmoteSettings::Mode::Targets;
          else throw std::invalid_argument("unknown smote mode '" + mode + "'");
        } else if (k == "targets") {
          for (const auto& [label, n] : v.items()) c.smote.targets[std::stoi(label)] = n.get<std::size_t>();
        } else if (k == "k_neighbors") {
          c.smote.k_neighbors = v.get<int>();
        } else {
          throw std::invalid_argument("unknown smote setting '" + k + "'");
        }
      }
    } else if (key == "train") {
      c.train = train_from_json(value, c.train);
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "only_channel") {
      if (value.is_null()) c.only_channel.reset();
      else c.only_channel = parse_channels(value.get<std::string>());
    } else if (key == "val_fraction") {
      c.val_fraction = value.get<double>();
    } else if (key == "classes") {
      c.classes = value.get<std::string>();
    } else if (key == "train_csv") {
      c.train_csv = value.get<std::string>();
    } else if (key == "test_csv") {
      c.test_csv = value.get<std::string>();
    } else if (key == "out_dir") {
      c.out_dir = value.get<std::string>();
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  c.train.seed = c.seed;
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  try {
    return config_from_json(read_json(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void save_config(const fs::path& path, const PipelineConfig& config) {
  io::write_text(path, to_json(config).dump(2) + "\n");
}

Json cmd_build(const PipelineConfig& config) {
  const auto names = stage("config", [&] { return resolve_classes(config.classes); });
  auto [train, test] = stage("load", [&] {
    auto tr = dataset::load_csv(config.train_csv, dataset::Split::Train, names);
    auto te = dataset::load_csv(config.test_csv, dataset::Split::Test, names);
    if (!names) {
      // Inferred maps: both splits share the union of the observed labels.
      io::ClassNames merged = tr.class_names;
      merged.insert(te.class_names.begin(), te.class_names.end());
      tr.class_names = te.class_names = merged;
    }
    if (tr.size() > 0 && te.size() > 0 && tr.beat_length != te.beat_length) {
      throw std::invalid_argument("train beats have " + std::to_string(tr.beat_length) +
                                  " samples, test beats " + std::to_string(te.beat_length));
    }
    return std::pair{std::move(tr), std::move(te)};
  });
  const auto counts_before = train.class_counts();
  const std::size_t source_rows = train.size();

  if (config.smote.mode != SmoteSettings::Mode::Off) {
    train = stage("smote", [&] {
      dataset::SmoteConfig sc;
      sc.k_neighbors = config.smote.k_neighbors;
      sc.seed = config.seed;
      if (config.smote.mode == SmoteSettings::Mode::Targets) sc.target_counts = config.smote.targets;
      return dataset::smote(train, sc);
    });
  }

  auto encode = [&](const dataset::BeatDataset& ds, const char* split_name) {
    return stage(std::string("encode ") + split_name, [&] {
      auto store = dataset::encode_dataset(ds, config.encoder);
      if (config.only_channel) mask_channels(store, *config.only_channel);
      return store;
    });
  };
  const auto train_store = encode(train, "train");
  const auto test_store = encode(test, "test");

  return stage("write", [&] {
    const fs::path out(config.out_dir);
    fs::create_directories(out);
    const auto train_sum = io::write_store(out / "train", train_store);
    const auto test_sum = io::write_store(out / "test", test_store);

    Json manifest;
    manifest["format"] = kManifestFormat;
    manifest["version"] = 1;
    manifest["seed"] = config.seed;
    manifest["config"] = to_json(config, false);
    manifest["inputs"] = Json{
        {"train", Json{{"file", fs::path(config.train_csv).filename().string()},
                       {"sha256", io::sha256_file(config.train_csv)},
                       {"rows", source_rows},
                       {"counts", counts_json(counts_before)}}},
        {"test", Json{{"file", fs::path(config.test_csv).filename().string()},
                      {"sha256", io::sha256_file(config.test_csv)},
                      {"rows", test.size()},
                      {"counts", counts_json(test.class_counts())}}}};
    manifest["class_names"] = class_names_json(train.class_names);
    manifest["beat_length"] = train.beat_length;
    manifest["stores"] = Json{{"train", store_summary(train_store, train_sum, out / "train")},
                              {"test", store_summary(test_store, test_sum, out / "test")}};
    io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
  });
}

std::pair<io::TensorStore, io::TensorStore> split_validation(const io::TensorStore& store,
                                                             double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("val_fraction must lie in [0, 1)");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < store.count(); ++i) by_class[store.labels[i]].push_back(i);

  Rng rng(seed, kValidationStream);
  std::vector<bool> to_val(store.count(), false);
  for (auto& [label, idx] : by_class) {
    if (fraction == 0.0 || idx.size() < 2) continue;
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size()))));
    for (std::size_t i = 0; i < std::min(take, idx.size() - 1); ++i) to_val[idx[i]] = true;
  }

  auto subset = [&](bool val) {
    io::TensorStore out;
    out.class_names = store.class_names;
    out.shape = store.shape;
    out.shape[0] = 0;
    for (std::size_t i = 0; i < store.count(); ++i) {
      if (to_val[i] != val) continue;
      const auto s = store.slice(i);
      out.data.insert(out.data.end(), s.begin(), s.end());
      out.labels.push_back(store.labels[i]);
      ++out.shape[0];
    }
    return out;
  };
  return {subset(false), subset(true)};
}

fs::path checkpoint_stem(const fs::path& model_dir, Channels channels) {
  return model_dir / ("model_" + to_string(channels));
}

void save_checkpoint(const fs::path& stem, const Checkpoint& cp) {
  const auto& m = cp.model;
  const fs::path weights_file(stem.string() + ".weights.bin");
  const fs::path bias_file(stem.string() + ".bias.bin");
  const auto wbytes = io::to_le_bytes(m.weights.values());
  const auto bbytes = io::to_le_bytes(std::span<const double>(m.bias));
  io::write_bytes(weights_file, wbytes);
  io::write_bytes(bias_file, bbytes);

  Json history = Json::array();
  for (const auto& e : cp.history) history.push_back(Json{{"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  Json j;
  j["format"] = kCheckpointFormat;
  j["version"] = 1;
  j["dtype"] = "float64";
  j["byte_order"] = "little";
  j["classes"] = m.classes();
  j["features"] = m.features();
  j["feature_side"] = m.feature_side;
  j["channels"] = to_string(cp.channels);
  j["class_names"] = class_names_json(cp.class_names);
  j["train"] = train_json(cp.train);
  j["seed"] = cp.train.seed;
  j["best_epoch"] = cp.best_epoch;
  j["history"] = history;
  j["tensors"] = Json{
      {"weights", Json{{"file", weights_file.filename().string()},
                       {"shape", {m.classes(), m.features()}},
                       {"sha256", io::sha256_hex(wbytes)}}},
      {"bias", Json{{"file", bias_file.filename().string()},
                    {"shape", {m.classes()}},
                    {"sha256", io::sha256_hex(bbytes)}}}};
  io::write_text(io::header_path(stem), j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const fs::path& stem) {
  const auto j = read_json(io::header_path(stem));
  if (j.value("format", "") != kCheckpointFormat) {
    throw std::runtime_error(io::header_path(stem).string() + " is not a checkpoint");
  }
  const auto classes = j.at("classes").get<std::size_t>();
  const auto features = j.at("features").get<std::size_t>();
  auto tensor = [&](const char* name, std::size_t expected) {
    const auto& t = j.at("tensors").at(name);
    const auto bytes = io::read_bytes(stem.parent_path() / t.at("file").get<std::string>());
    if (io::sha256_hex(bytes) != t.at("sha256").get<std::string>()) {
      throw std::runtime_error(std::string("checksum mismatch for checkpoint ") + name);
    }
    auto values = io::doubles_from_le_bytes(bytes);
    if (values.size() != expected) throw std::runtime_error(std::string("checkpoint ") + name + " has the wrong size");
    return values;
  };
  Checkpoint cp;
  cp.model = classifier::SoftmaxModel::zeros(classes, features, j.at("feature_side").get<std::size_t>());
  const auto w = tensor("weights", classes * features);
  std::copy(w.begin(), w.end(), cp.model.weights.values().begin());
  cp.model.bias = tensor("bias", classes);
  cp.class_names = class_names_from_json(j.at("class_names"));
  cp.channels = parse_channels(j.at("channels").get<std::string>());
  cp.train = train_from_json(j.at("train"), {});
  cp.train.seed = j.at("seed").get<std::uint64_t>();
  cp.best_epoch = j.at("best_epoch").get<std::size_t>();
  for (const auto& e : j.at("history")) {
    cp.history.push_back({e.at("train_loss").get<double>(), e.at("val_loss").get<double>()});
  }
  return cp;
}

Checkpoint cmd_train(const PipelineConfig& config, const fs::path& store_dir, const fs::path& model_dir,
                     Channels channels) {
  auto store = stage("load", [&] { return io::read_store(store_dir / "train"); });
  mask_channels(store, channels);
  return stage("train", [&] {
    auto [fit, val] = split_validation(store, config.val_fraction, config.seed);
    classifier::TrainConfig tc = config.train;
    tc.seed = config.seed;
    const auto initial =
        classifier::SoftmaxModel::zeros(class_count(store.class_names), store.slice_size(), store.shape[2]);
    auto result = classifier::train(initial, fit, val, tc);

    Checkpoint cp{std::move(result.model), store.class_names, channels, tc, std::move(result.history),
                  result.best_epoch};
    fs::create_directories(model_dir);
    save_checkpoint(checkpoint_stem(model_dir, channels), cp);
    return cp;
  });
}

metrics::EvalReport cmd_eval(const fs::path& store_dir, const fs::path& model_dir, Channels channels) {
  auto store = stage("load", [&] { return io::read_store(store_dir / "test"); });
  const auto cp = stage("load", [&] {
    const auto own = checkpoint_stem(model_dir, channels);
    if (fs::exists(io::header_path(own))) return load_checkpoint(own);
    return load_checkpoint(checkpoint_stem(model_dir, Channels::Fused));
  });
  mask_channels(store, channels);
  return stage("eval", [&] {
    const auto preds = classifier::predict(cp.model, store);
    return metrics::evaluate(preds, store.labels, cp.model.classes());
  });
}

Json report_to_json(const metrics::EvalReport& r, const io::ClassNames& class_names,
                    const std::string& modality) {
  Json per_class = Json::array();
  for (std::size_t c = 0; c < r.precision.size(); ++c) {
    const auto it = class_names.find(static_cast<int>(c));
    per_class.push_back(Json{{"class", c},
                             {"name", it != class_names.end() ? it->second : std::to_string(c)},
                             {"precision", r.precision[c]},
                             {"recall", r.recall[c]},
                             {"support", r.support[c]}});
  }
  return Json{{"modality", modality},
              {"total", r.total},
              {"accuracy", r.accuracy},
              {"precision_macro", r.precision_macro},
              {"recall_macro", r.recall_macro},
              {"precision_weighted", r.precision_weighted},
              {"recall_weighted", r.recall_weighted},
              {"per_class", per_class},
              {"confusion", r.confusion}};
}

void encode_to_pngs(const encoders::TimeSeries& series, const encoders::EncoderConfig& config,
                    const fs::path& out_dir, bool fused) {
  fs::create_directories(out_dir);
  const auto gaf = encoders::gasf(series);
  const auto rp = encoders::recurrence_plot(series, config.rp_mode, config.eps_fraction);
  const auto mtf = encoders::mtf_image(series, encoders::mtf_fit(series, config.bins), config.mtf_layout);
  io::write_png_gray(out_dir / "gaf.png", gaf);
  io::write_png_gray(out_dir / "rp.png", rp);
  io::write_png_gray(out_dir / "mtf.png", mtf);
  if (fused) io::write_png_rgb(out_dir / "fused.png", encoders::fuse(gaf, rp, mtf, config.size));
}

std::string inspect(const fs::path& path) {
  const fs::path stem = strip_extension(path);
  fs::path header = io::header_path(stem);
  if (!fs::exists(header) && fs::is_directory(path)) header = path / "manifest.json";
  if (!fs::exists(header)) header = path;
  const auto j = read_json(header);
  const auto format = j.value("format", "");
  std::ostringstream out;
  if (format == "ifm-tensor") {
    const auto store = io::read_store(strip_extension(header));
    out << "tensor store " << stem.string() << "\n  shape [" << store.shape[0] << ", " << store.shape[1]
        << ", " << store.shape[2] << ", " << store.shape[3] << "] float32\n  sha256 "
        << j.at("sha256").get<std::string>() << " (verified)\n  classes:";
    std::map<int, std::size_t> counts;
    for (int l : store.labels) ++counts[l];
    for (const auto& [id, name] : store.class_names) out << " " << id << "=" << name << "(" << counts[id] << ")";
    out << "\n";
  } else if (format == kCheckpointFormat) {
    const auto cp = load_checkpoint(strip_extension(header));
    out << "checkpoint " << strip_extension(header).string() << "\n  classes " << cp.model.classes()
        << ", features " << cp.model.features() << ", side " << cp.model.feature_side << ", channels "
        << to_string(cp.channels) << "\n  epochs " << cp.history.size() << ", best epoch " << cp.best_epoch;
    if (!cp.history.empty() && cp.best_epoch > 0) out << ", best val loss " << cp.history[cp.best_epoch - 1].val_loss;
    out << "\n";
  } else if (format == kManifestFormat) {
    out << "manifest " << header.string() << "\n  seed " << j.at("seed") << "\n";
    for (const auto& [name, s] : j.at("stores").items()) {
      out << "  " << name << ": shape " << s.at("shape").dump() << " counts " << s.at("counts").dump()
          << " sha256 " << s.at("sha256").get<std::string>() << "\n";
    }
  } else {
    throw std::runtime_error(header.string() + " is not a store, checkpoint or manifest");
  }
  return out.str();
}

}  // namespace ifm::pipeline
