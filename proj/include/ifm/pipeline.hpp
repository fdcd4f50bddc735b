#pragma once

// End-to-end workflow behind the command-line tool: build tensor stores from
// beat CSVs, train the softmax classifier, evaluate with channel ablation.
// Every step is deterministic given its inputs and the configured seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifm/classifier.hpp"
#include "ifm/dataset.hpp"
#include "ifm/encoders.hpp"
#include "ifm/io.hpp"
#include "ifm/metrics.hpp"
#include "json.hpp"

namespace ifm::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum class Channels { Gaf, Rp, Mtf, Fused };

inline constexpr Channels kAblationOrder[] = {Channels::Gaf, Channels::Rp, Channels::Mtf,
                                              Channels::Fused};

std::string to_string(Channels channels);
Channels parse_channels(const std::string& text);
/// Row label used in ablation tables: GAF, RP, MTF, IFM.
std::string table_name(Channels channels);

/// Zeroes every channel except the selected one (no-op for Fused).
void mask_channels(io::TensorStore& store, Channels keep);

std::string to_string(encoders::RpMode mode);
encoders::RpMode parse_rp_mode(const std::string& text);
std::string to_string(encoders::MtfLayout layout);
encoders::MtfLayout parse_mtf_layout(const std::string& text);

struct SmoteSettings {
  enum class Mode { Off, Balance, Targets };
  Mode mode = Mode::Off;
  std::map<int, std::size_t> targets;
  int k_neighbors = 5;

  bool operator==(const SmoteSettings&) const = default;
};

/// "off", "balance" or "targets=<label>:<count>,...".
SmoteSettings parse_smote(const std::string& text);
std::string to_string(const SmoteSettings& smote);

/// "auto" (labels as names), "mitbih", "ptb" or "<label>:<name>,...".
std::optional<io::ClassNames> resolve_classes(const std::string& spec);

struct PipelineConfig {
  encoders::EncoderConfig encoder;
  SmoteSettings smote;
  classifier::TrainConfig train;  ///< train.seed is overwritten by `seed`
  std::uint64_t seed = 0;
  std::optional<Channels> only_channel;  ///< build-time channel selection
  double val_fraction = 0.1;
  std::string classes = "auto";
  std::string train_csv;
  std::string test_csv;
  std::string out_dir;

  bool operator==(const PipelineConfig&) const = default;
};

/// Paths are left out when include_paths is false so that artefacts do not
/// depend on where they were written.
Json to_json(const PipelineConfig& config, bool include_paths = true);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const Json& json);
PipelineConfig load_config(const fs::path& path);
void save_config(const fs::path& path, const PipelineConfig& config);

/// Stage failures are rethrown with the stage name prefixed.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Loads both CSVs, applies SMOTE to train, encodes both splits and writes
/// <out>/train.{bin,json}, <out>/test.{bin,json} and <out>/manifest.json.
/// Returns the manifest.
Json cmd_build(const PipelineConfig& config);

/// Deterministic stratified hold-out: about `fraction` of each class (at
/// least one beat for classes with two or more) goes to validation.
std::pair<io::TensorStore, io::TensorStore> split_validation(const io::TensorStore& store,
                                                             double fraction, std::uint64_t seed);

struct Checkpoint {
  classifier::SoftmaxModel model;
  io::ClassNames class_names;
  Channels channels = Channels::Fused;
  classifier::TrainConfig train;
  std::vector<classifier::EpochRecord> history;
  std::size_t best_epoch = 0;
};

fs::path checkpoint_stem(const fs::path& model_dir, Channels channels);
void save_checkpoint(const fs::path& stem, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const fs::path& stem);

/// Trains on <store_dir>/train with the unselected channels zeroed and writes
/// <model_dir>/model_<channels>.
Checkpoint cmd_train(const PipelineConfig& config, const fs::path& store_dir,
                     const fs::path& model_dir, Channels channels);

/// Evaluates <store_dir>/test. Uses model_<channels> when present, otherwise
/// model_fused with the unselected channels zeroed.
metrics::EvalReport cmd_eval(const fs::path& store_dir, const fs::path& model_dir, Channels channels);

Json report_to_json(const metrics::EvalReport& report, const io::ClassNames& class_names,
                    const std::string& modality);

/// Writes gaf.png, rp.png, mtf.png and, if `fused`, fused.png into out_dir.
void encode_to_pngs(const encoders::TimeSeries& series, const encoders::EncoderConfig& config,
                    const fs::path& out_dir, bool fused);

/// Human-readable summary of a tensor store, checkpoint or manifest.
std::string inspect(const fs::path& path);

}  // namespace ifm::pipeline
