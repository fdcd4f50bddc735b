#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifm/encoders.hpp"
#include "ifm/io.hpp"

namespace ifm::dataset {

using encoders::TimeSeries;
using io::ClassNames;

enum class Split { Train, Test };

std::string_view to_string(Split split);

inline constexpr std::size_t kBeatLength = 187;

/// Label maps of the two pre-segmented heartbeat distributions.
ClassNames mitbih_classes();
ClassNames ptb_classes();

struct BeatDataset {
  std::vector<TimeSeries> beats;  ///< every beat carries a label
  ClassNames class_names;
  std::size_t beat_length = kBeatLength;
  Split split = Split::Train;

  std::size_t size() const { return beats.size(); }
  std::map<int, std::size_t> class_counts() const;
};

/// Parses one beat per row: beat_length numeric columns then the label. The
/// label may be written as a float ("1.0e+00") but must be integral. With no
/// class map, names are the label ids as text. Errors name the 1-based row.
BeatDataset load_csv(const std::filesystem::path& path, Split split,
                     const std::optional<ClassNames>& class_names = std::nullopt);

/// Same as load_csv over in-memory text.
BeatDataset parse_csv(const std::string& text, Split split,
                      const std::optional<ClassNames>& class_names = std::nullopt);

struct SmoteConfig {
  int k_neighbors = 5;
  std::map<int, std::size_t> target_counts;  ///< empty: balance to the majority class
  std::uint64_t seed = 0;
};

/// Per-class target equal to the largest class count.
std::map<int, std::size_t> balance_targets(const BeatDataset& dataset);

/// Synthetic minority oversampling. Originals are kept in order; synthetic
/// beats are appended class by class in ascending label order. Each synthetic
/// beat is x + u (x_nn - x) with u in [0, 1) and x_nn one of the k nearest
/// same-class neighbours of x (Euclidean, ties to the lower index).
BeatDataset smote(const BeatDataset& dataset, const SmoteConfig& config);

/// Encodes every beat into an [N, 3, S, S] float32 store with aligned labels.
/// Errors are rethrown as std::runtime_error naming the beat index.
io::TensorStore encode_dataset(const BeatDataset& dataset, const encoders::EncoderConfig& config);

}  // namespace ifm::dataset
