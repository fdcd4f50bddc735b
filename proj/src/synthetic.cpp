#include "ifm/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "ifm/random.hpp"

namespace ifm::synthetic {

io::ClassNames corpus_classes() { return {{0, "sine"}, {1, "square"}, {2, "chirp"}}; }

dataset::BeatDataset corpus(const CorpusSpec& spec, dataset::Split split) {
  dataset::BeatDataset ds;
  ds.class_names = corpus_classes();
  ds.beat_length = spec.length;
  ds.split = split;
  Rng rng(spec.seed);
  const double n = static_cast<double>(spec.length);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  // Interleave classes so a prefix of the corpus is balanced.
  for (std::size_t i = 0; i < spec.per_class; ++i) {
    for (int label = 0; label < 3; ++label) {
      const double cycles = 1.5 + rng.uniform();
      const double phase = two_pi * rng.uniform();
      const double amplitude = 0.8 + 0.4 * rng.uniform();
      std::vector<double> x(spec.length);
      for (std::size_t t = 0; t < spec.length; ++t) {
        const double u = static_cast<double>(t) / n;
        double v = 0.0;
        switch (label) {
          case 0: v = std::sin(two_pi * cycles * u + phase); break;
          case 1: v = std::sin(two_pi * cycles * u + phase) >= 0.0 ? 1.0 : -1.0; break;
          default: v = std::sin(two_pi * (0.5 * u + 2.0 * cycles * u * u) + phase); break;
        }
        x[t] = amplitude * v + spec.noise * rng.normal();
      }
      ds.beats.emplace_back(std::move(x), label);
    }
  }
  return ds;
}

void write_csv(const std::filesystem::path& path, const dataset::BeatDataset& data) {
  std::string text;
  char buf[32];
  for (const auto& beat : data.beats) {
    for (double v : beat.samples()) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      text += buf;
    }
    text += std::to_string(beat.label().value_or(0));
    text += '\n';
  }
  io::write_text(path, text);
}

}  // namespace ifm::synthetic
