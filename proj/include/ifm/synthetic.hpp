#pragma once

#include <cstdint>
#include <filesystem>

#include "ifm/dataset.hpp"

namespace ifm::synthetic {

/// Three beat morphologies used for smoke runs: 0 = sine, 1 = square,
/// 2 = linear chirp. Frequency, phase and amplitude are jittered per beat and
/// Gaussian noise is added.
struct CorpusSpec {
  std::size_t per_class = 150;
  std::size_t length = dataset::kBeatLength;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

dataset::BeatDataset corpus(const CorpusSpec& spec, dataset::Split split = dataset::Split::Train);

io::ClassNames corpus_classes();

/// Writes one beat per row in the pre-segmented CSV layout (samples, label).
void write_csv(const std::filesystem::path& path, const dataset::BeatDataset& data);

}  // namespace ifm::synthetic
