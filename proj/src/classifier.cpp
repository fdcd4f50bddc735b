#include "ifm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ifm/random.hpp"

namespace ifm::classifier {

namespace {

constexpr std::size_t kChunk = 256;

void require_features(const SoftmaxModel& model, std::size_t features) {
  if (features != model.features()) {
    throw std::invalid_argument("feature dimension " + std::to_string(features) +
                                " does not match model dimension " + std::to_string(model.features()));
  }
}

void require_labels(std::span<const int> labels, std::size_t classes) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw std::invalid_argument("label " + std::to_string(labels[i]) + " at row " +
                                  std::to_string(i) + " is outside [0, " +
                                  std::to_string(classes) + ")");
    }
  }
}

double weight_norm_sq(const Matrix& w) {
  double s = 0.0;
  for (double v : w.values()) s += v * v;
  return s;
}

// Sum of -log p(label) over rows.
double cross_entropy_sum(const Matrix& probs, std::span<const int> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    s -= std::log(std::max(probs(i, static_cast<std::size_t>(labels[i])), 1e-300));
  }
  return s;
}

bool all_finite(const SoftmaxModel& m) {
  for (double v : m.weights.values())
    if (!std::isfinite(v)) return false;
  for (double v : m.bias)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

SoftmaxModel SoftmaxModel::zeros(std::size_t classes, std::size_t features, std::size_t side) {
  return SoftmaxModel{Matrix(classes, features), std::vector<double>(classes, 0.0), side};
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be finite and >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw std::invalid_argument("l2 must be finite and >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
  if (patience < 1) throw std::invalid_argument("patience must be at least 1");
}

Matrix forward(const SoftmaxModel& model, const Matrix& batch) {
  require_features(model, batch.cols());
  const std::size_t k = model.classes();
  Matrix probs(batch.rows(), k);
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    const auto x = batch.row(i);
    auto p = probs.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      const auto w = model.weights.row(c);
      p[c] = std::inner_product(x.begin(), x.end(), w.begin(), model.bias[c]);
    }
    const double top = *std::max_element(p.begin(), p.end());
    double total = 0.0;
    for (double& v : p) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : p) v /= total;
  }
  return probs;
}

LossAndGrad loss_and_grad(const SoftmaxModel& model, const Matrix& batch,
                          std::span<const int> labels, double l2) {
  if (labels.size() != batch.rows()) {
    throw std::invalid_argument("batch has " + std::to_string(batch.rows()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  }
  if (batch.rows() == 0) throw std::invalid_argument("empty batch");
  require_labels(labels, model.classes());
  const Matrix probs = forward(model, batch);
  const double n = static_cast<double>(batch.rows());

  LossAndGrad out;
  out.loss = cross_entropy_sum(probs, labels) / n + 0.5 * l2 * weight_norm_sq(model.weights);
  out.grad.weights = Matrix(model.classes(), model.features());
  out.grad.bias.assign(model.classes(), 0.0);
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    const auto x = batch.row(i);
    for (std::size_t c = 0; c < model.classes(); ++c) {
      // d loss / d logit = p - onehot
      const double delta =
          (probs(i, c) - (static_cast<std::size_t>(labels[i]) == c ? 1.0 : 0.0)) / n;
      out.grad.bias[c] += delta;
      auto g = out.grad.weights.row(c);
      for (std::size_t d = 0; d < x.size(); ++d) g[d] += delta * x[d];
    }
  }
  if (l2 != 0.0) {
    auto g = out.grad.weights.values();
    const auto w = model.weights.values();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += l2 * w[j];
  }
  return out;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto r = scores.row(i);
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

Matrix to_matrix(const io::TensorStore& store, std::span<const std::size_t> rows) {
  Matrix m(rows.size(), store.slice_size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = store.slice(rows[i]);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

Matrix to_matrix(const io::TensorStore& store) {
  std::vector<std::size_t> rows(store.count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return to_matrix(store, rows);
}

std::vector<int> predict(const SoftmaxModel& model, const Matrix& features) {
  // Softmax is monotone, so the argmax of the probabilities is the argmax of
  // the logits up to exact ties, which both resolve to the lowest id.
  return argmax_rows(forward(model, features));
}

std::vector<int> predict(const SoftmaxModel& model, const io::TensorStore& store) {
  require_features(model, store.slice_size());
  std::vector<int> out;
  out.reserve(store.count());
  for (std::size_t start = 0; start < store.count(); start += kChunk) {
    std::vector<std::size_t> rows;
    for (std::size_t i = start; i < std::min(store.count(), start + kChunk); ++i) rows.push_back(i);
    const auto part = predict(model, to_matrix(store, rows));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

double dataset_loss(const SoftmaxModel& model, const io::TensorStore& store, double l2) {
  if (store.count() == 0) throw std::invalid_argument("loss of an empty store");
  require_features(model, store.slice_size());
  require_labels(store.labels, model.classes());
  double total = 0.0;
  for (std::size_t start = 0; start < store.count(); start += kChunk) {
    std::vector<std::size_t> rows;
    for (std::size_t i = start; i < std::min(store.count(), start + kChunk); ++i) rows.push_back(i);
    const Matrix probs = forward(model, to_matrix(store, rows));
    total += cross_entropy_sum(probs, std::span(store.labels).subspan(start, rows.size()));
  }
  return total / static_cast<double>(store.count()) + 0.5 * l2 * weight_norm_sq(model.weights);
}

TrainResult train(const SoftmaxModel& initial, const io::TensorStore& train_store,
                  const io::TensorStore& val_store, const TrainConfig& config) {
  config.validate();
  if (train_store.count() == 0) throw std::invalid_argument("training store is empty");
  require_features(initial, train_store.slice_size());
  require_labels(train_store.labels, initial.classes());
  if (val_store.count() > 0) {
    if (val_store.slice_size() != train_store.slice_size()) {
      throw std::invalid_argument("validation store feature size differs from the training store");
    }
    require_labels(val_store.labels, initial.classes());
  }
  const io::TensorStore& monitor = val_store.count() > 0 ? val_store : train_store;

  SoftmaxModel model = initial;
  Matrix velocity_w(model.classes(), model.features());
  std::vector<double> velocity_b(model.classes(), 0.0);

  TrainResult result;
  result.model = model;
  double best = dataset_loss(model, monitor, config.l2);
  std::size_t stale = 0;

  Rng rng(config.seed);
  std::vector<std::size_t> order(train_store.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> batch_labels;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto rows = std::span(order).subspan(start, std::min(config.batch_size, order.size() - start));
      batch_labels.clear();
      for (auto r : rows) batch_labels.push_back(train_store.labels[r]);
      const auto step = loss_and_grad(model, to_matrix(train_store, rows), batch_labels, config.l2);

      auto vw = velocity_w.values();
      auto w = model.weights.values();
      const auto gw = step.grad.weights.values();
      for (std::size_t j = 0; j < vw.size(); ++j) {
        vw[j] = config.momentum * vw[j] - config.learning_rate * gw[j];
        w[j] += vw[j];
      }
      for (std::size_t c = 0; c < velocity_b.size(); ++c) {
        velocity_b[c] = config.momentum * velocity_b[c] - config.learning_rate * step.grad.bias[c];
        model.bias[c] += velocity_b[c];
      }
    }
    if (!all_finite(model)) {
      throw std::runtime_error("parameters diverged to non-finite values in epoch " + std::to_string(epoch));
    }

    EpochRecord record;
    record.train_loss = dataset_loss(model, train_store, config.l2);
    record.val_loss = &monitor == &train_store ? record.train_loss : dataset_loss(model, monitor, config.l2);
    result.history.push_back(record);

    if (record.val_loss < best) {
      best = record.val_loss;
      result.model = model;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace ifm::classifier
