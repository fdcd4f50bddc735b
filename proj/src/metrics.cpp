#include "ifm/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace ifm::metrics {

EvalReport evaluate(std::span<const int> predictions, std::span<const int> truth, std::size_t classes) {
  if (predictions.size() != truth.size()) {
    throw std::invalid_argument("got " + std::to_string(predictions.size()) + " predictions for " +
                                std::to_string(truth.size()) + " labels");
  }
  if (classes == 0) throw std::invalid_argument("class count must be positive");
  auto check = [classes](int label, const char* what, std::size_t i) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw std::invalid_argument(std::string(what) + " label " + std::to_string(label) + " at " +
                                  std::to_string(i) + " is outside [0, " + std::to_string(classes) + ")");
    }
  };

  EvalReport r;
  r.confusion.assign(classes, std::vector<long long>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    check(truth[i], "true", i);
    check(predictions[i], "predicted", i);
    ++r.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predictions[i])];
  }
  r.total = truth.size();

  long long diagonal = 0;
  r.precision.assign(classes, 0.0);
  r.recall.assign(classes, 0.0);
  r.support.assign(classes, 0);
  for (std::size_t c = 0; c < classes; ++c) {
    const long long tp = r.confusion[c][c];
    diagonal += tp;
    long long row = 0, col = 0;
    for (std::size_t o = 0; o < classes; ++o) {
      row += r.confusion[c][o];
      col += r.confusion[o][c];
    }
    r.support[c] = row;
    r.precision[c] = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    r.recall[c] = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
  }
  const double k = static_cast<double>(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    r.precision_macro += r.precision[c] / k;
    r.recall_macro += r.recall[c] / k;
    if (r.total > 0) {
      const double w = static_cast<double>(r.support[c]) / static_cast<double>(r.total);
      r.precision_weighted += w * r.precision[c];
      r.recall_weighted += w * r.recall[c];
    }
  }
  r.accuracy = r.total > 0 ? static_cast<double>(diagonal) / static_cast<double>(r.total) : 0.0;
  return r;
}

std::string render_table(std::span<const AblationRow> rows) {
  std::size_t name_width = std::string("Modalities").size();
  for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());
  const int w = static_cast<int>(name_width);

  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %10s  %11s  %8s\n", w, "Modalities", "Accuracy %",
                "Precision %", "Recall %");
  out += line;
  out += std::string(name_width + 2 + 10 + 2 + 11 + 2 + 8, '-') + "\n";
  for (const auto& [name, r] : rows) {
    std::snprintf(line, sizeof line, "%-*s  %10.1f  %11.1f  %8.1f\n", w, name.c_str(),
                  100.0 * r.accuracy, 100.0 * r.precision_macro, 100.0 * r.recall_macro);
    out += line;
  }
  return out;
}

}  // namespace ifm::metrics
