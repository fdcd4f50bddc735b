#include "ifm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ifm/random.hpp"

namespace ifm::dataset {

namespace {

std::string row_error(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return v;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

// Indices (into members) of the k nearest members to members[self].
std::vector<std::size_t> nearest(const std::vector<const TimeSeries*>& members, std::size_t self,
                                 int k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(members.size() - 1);
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (j == self) continue;
    dist.emplace_back(squared_distance(members[self]->samples(), members[j]->samples()), j);
  }
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kk; ++i) out.push_back(dist[i].second);
  return out;
}

}  // namespace

std::string_view to_string(Split split) { return split == Split::Train ? "train" : "test"; }

ClassNames mitbih_classes() { return {{0, "N"}, {1, "S"}, {2, "V"}, {3, "F"}, {4, "Q"}}; }
ClassNames ptb_classes() { return {{0, "normal"}, {1, "MI"}}; }

std::map<int, std::size_t> BeatDataset::class_counts() const {
  std::map<int, std::size_t> counts;
  for (const auto& [id, name] : class_names) counts[id] = 0;
  for (const auto& beat : beats) ++counts[*beat.label()];
  return counts;
}

BeatDataset parse_csv(const std::string& text, Split split,
                      const std::optional<ClassNames>& class_names) {
  BeatDataset ds;
  ds.split = split;
  if (class_names) ds.class_names = *class_names;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::optional<std::size_t> width;
  std::vector<double> fields;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    fields.clear();
    std::string_view rest(line);
    std::size_t column = 0;
    while (true) {
      ++column;
      const auto comma = rest.find(',');
      const auto field = rest.substr(0, comma);
      const auto v = parse_number(field);
      if (!v) {
        throw std::runtime_error(row_error(row, "column " + std::to_string(column) +
                                                    " is not numeric: '" + std::string(trim(field)) + "'"));
      }
      fields.push_back(*v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 3) {
      throw std::runtime_error(row_error(row, "expected samples followed by a label"));
    }
    if (!width) width = fields.size();
    if (fields.size() != *width) {
      throw std::runtime_error(row_error(row, "has " + std::to_string(fields.size() - 1) +
                                                  " samples, expected " + std::to_string(*width - 1)));
    }
    const double raw_label = fields.back();
    if (!std::isfinite(raw_label) || raw_label != std::floor(raw_label) || std::abs(raw_label) > 1e9) {
      throw std::runtime_error(row_error(row, "label is not an integer"));
    }
    const int label = static_cast<int>(raw_label);
    if (class_names) {
      if (!ds.class_names.contains(label)) {
        throw std::runtime_error(row_error(row, "unknown label " + std::to_string(label)));
      }
    } else {
      ds.class_names.try_emplace(label, std::to_string(label));
    }
    fields.pop_back();
    try {
      ds.beats.emplace_back(fields, label);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(row_error(row, e.what()));
    }
  }
  ds.beat_length = width ? *width - 1 : kBeatLength;
  return ds;
}

BeatDataset load_csv(const std::filesystem::path& path, Split split,
                     const std::optional<ClassNames>& class_names) {
  try {
    return parse_csv(io::read_text(path), split, class_names);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::map<int, std::size_t> balance_targets(const BeatDataset& dataset) {
  auto counts = dataset.class_counts();
  std::size_t majority = 0;
  for (const auto& [id, n] : counts) majority = std::max(majority, n);
  for (auto& [id, n] : counts) n = majority;
  return counts;
}

BeatDataset smote(const BeatDataset& dataset, const SmoteConfig& config) {
  if (dataset.split != Split::Train) {
    throw std::invalid_argument("SMOTE applies to the train split only");
  }
  if (config.k_neighbors < 1) throw std::invalid_argument("k_neighbors must be at least 1");
  const auto targets = config.target_counts.empty() ? balance_targets(dataset) : config.target_counts;

  std::map<int, std::vector<const TimeSeries*>> members;
  for (const auto& beat : dataset.beats) members[*beat.label()].push_back(&beat);

  for (const auto& [label, target] : targets) {
    if (!dataset.class_names.contains(label)) {
      throw std::invalid_argument("SMOTE target for unknown class " + std::to_string(label));
    }
    const std::size_t have = members[label].size();
    if (target < have) {
      throw std::invalid_argument("SMOTE target " + std::to_string(target) + " for class " +
                                  std::to_string(label) + " is below its current count " +
                                  std::to_string(have));
    }
    if (target > have && (have < 2 || static_cast<std::size_t>(config.k_neighbors) >= have)) {
      throw std::invalid_argument("class " + std::to_string(label) + " (" +
                                  dataset.class_names.at(label) + ") has " + std::to_string(have) +
                                  " beats, too few for k = " + std::to_string(config.k_neighbors));
    }
  }

  BeatDataset out = dataset;
  for (const auto& [label, target] : targets) {
    const auto& cls = members[label];
    const std::size_t have = cls.size();
    if (target == have) continue;
    Rng rng(config.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
    std::vector<std::optional<std::vector<std::size_t>>> neighbours(have);
    for (std::size_t s = 0; s < target - have; ++s) {
      const std::size_t base = s % have;
      if (!neighbours[base]) neighbours[base] = nearest(cls, base, config.k_neighbors);
      const auto& nn = *neighbours[base];
      const auto other = cls[nn[rng.below(nn.size())]]->samples();
      const double gap = rng.uniform();
      const auto x = cls[base]->samples();
      std::vector<double> synthetic(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) synthetic[i] = x[i] + gap * (other[i] - x[i]);
      out.beats.emplace_back(std::move(synthetic), label);
    }
  }
  return out;
}

io::TensorStore encode_dataset(const BeatDataset& dataset, const encoders::EncoderConfig& config) {
  io::TensorStore store;
  const std::size_t n = dataset.size();
  const std::size_t side = config.size;
  store.shape = {n, 3, side, side};
  store.class_names = dataset.class_names;
  store.data.assign(n * 3 * side * side, 0.0f);
  store.labels.reserve(n);
  for (const auto& beat : dataset.beats) store.labels.push_back(beat.label().value_or(-1));

  const std::size_t slice = 3 * side * side;
  auto encode_one = [&](std::size_t i) {
    const auto fused = encoders::encode_fused(dataset.beats[i], config);
    float* dst = store.data.data() + i * slice;
    for (const auto& channel : fused.channels) {
      for (double v : channel.pixels.values()) *dst++ = static_cast<float>(v);
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(n, 1));
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, std::string>> first_error;
  auto run = [&](std::size_t worker) {
    for (std::size_t i = worker; i < n; i += workers) {
      try {
        encode_one(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || i < first_error->first) first_error = {i, e.what()};
        return;
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  if (first_error) {
    throw std::runtime_error("beat " + std::to_string(first_error->first) + ": " + first_error->second);
  }
  return store;
}

}  // namespace ifm::dataset
