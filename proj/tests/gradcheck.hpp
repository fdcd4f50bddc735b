#pragma once

// Central finite-difference oracle for the softmax loss. It recomputes the
// loss from scratch through a plain scalar formula, not through
// ifm::classifier, so it stays independent of the analytic gradient path.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ifm/classifier.hpp"

namespace gradcheck {

struct Instance {
  ifm::classifier::SoftmaxModel model;
  ifm::Matrix batch;
  std::vector<int> labels;
  double l2 = 0.0;
};

inline long double reference_loss(const ifm::classifier::SoftmaxModel& m, const ifm::Matrix& x,
                             const std::vector<int>& y, double l2) {
  long double ce = 0.0L;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<long double> z(m.classes());
    for (std::size_t c = 0; c < m.classes(); ++c) {
      long double s = m.bias[c];
      for (std::size_t d = 0; d < m.features(); ++d) s += static_cast<long double>(m.weights(c, d)) * x(i, d);
      z[c] = s;
    }
    const long double top = *std::max_element(z.begin(), z.end());
    long double norm = 0.0L;
    for (auto v : z) norm += std::exp(v - top);
    ce -= z[static_cast<std::size_t>(y[i])] - top - std::log(norm);
  }
  long double penalty = 0.0L;
  for (double w : m.weights.values()) penalty += static_cast<long double>(w) * w;
  return ce / static_cast<long double>(x.rows()) + 0.5L * l2 * penalty;
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t features, std::size_t classes,
                                std::size_t rows, double l2) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
  Instance inst{ifm::classifier::SoftmaxModel::zeros(classes, features), ifm::Matrix(rows, features), {}, l2};
  for (auto& w : inst.model.weights.values()) w = 0.5 * n(rng);
  for (auto& b : inst.model.bias) b = 0.5 * n(rng);
  for (auto& v : inst.batch.values()) v = n(rng);
  for (std::size_t i = 0; i < rows; ++i) inst.labels.push_back(label(rng));
  return inst;
}

/// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over every
/// parameter, with central differences of step h.
inline double max_relative_error(const Instance& inst, double h = 1e-5, double floor = 1e-7) {
  const auto analytic = ifm::classifier::loss_and_grad(inst.model, inst.batch, inst.labels, inst.l2).grad;
  double worst = 0.0;
  auto compare = [&](double a, long double diff) {
    const double num = static_cast<double>(diff);
    worst = std::max(worst, std::abs(a - num) / std::max({std::abs(a), std::abs(num), floor}));
  };
  auto model = inst.model;
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    const double saved = model.weights.values()[j];
    model.weights.values()[j] = saved + h;
    const long double up = reference_loss(model, inst.batch, inst.labels, inst.l2);
    model.weights.values()[j] = saved - h;
    const long double down = reference_loss(model, inst.batch, inst.labels, inst.l2);
    model.weights.values()[j] = saved;
    compare(analytic.weights.values()[j], (up - down) / (2 * h));
  }
  for (std::size_t c = 0; c < model.bias.size(); ++c) {
    const double saved = model.bias[c];
    model.bias[c] = saved + h;
    const long double up = reference_loss(model, inst.batch, inst.labels, inst.l2);
    model.bias[c] = saved - h;
    const long double down = reference_loss(model, inst.batch, inst.labels, inst.l2);
    model.bias[c] = saved;
    compare(analytic.bias[c], (up - down) / (2 * h));
  }
  return worst;
}

}  // namespace gradcheck
