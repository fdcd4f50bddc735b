#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ifm::metrics {

struct EvalReport {
  std::vector<std::vector<long long>> confusion;  ///< rows = true class, cols = predicted
  std::size_t total = 0;
  double accuracy = 0.0;
  std::vector<double> precision;  ///< per class; 0 when nothing was predicted as the class
  std::vector<double> recall;     ///< per class; 0 when the class never occurs
  std::vector<long long> support;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double precision_weighted = 0.0;  ///< weighted by true-class support
  double recall_weighted = 0.0;

  bool operator==(const EvalReport&) const = default;
};

/// Throws std::invalid_argument on a length mismatch or a label outside [0, classes).
EvalReport evaluate(std::span<const int> predictions, std::span<const int> truth, std::size_t classes);

/// One row of an ablation table: the modality name and its report.
using AblationRow = std::pair<std::string, EvalReport>;

/// Fixed-width text table: Modalities | Accuracy % | Precision % | Recall %.
std::string render_table(std::span<const AblationRow> rows);

}  // namespace ifm::metrics
