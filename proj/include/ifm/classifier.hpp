#pragma once

// Multinomial softmax regression over flattened fused images, trained by
// mini-batch SGD with momentum and an L2 penalty on the weights.

#include <cstdint>
#include <span>
#include <vector>

#include "ifm/io.hpp"
#include "ifm/matrix.hpp"

namespace ifm::classifier {

struct SoftmaxModel {
  Matrix weights;             ///< K x D
  std::vector<double> bias;   ///< K
  std::size_t feature_side = 0;

  static SoftmaxModel zeros(std::size_t classes, std::size_t features, std::size_t side = 0);

  std::size_t classes() const { return weights.rows(); }
  std::size_t features() const { return weights.cols(); }

  bool operator==(const SoftmaxModel&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double l2 = 0.004;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct Gradients {
  Matrix weights;
  std::vector<double> bias;
};

struct LossAndGrad {
  double loss = 0.0;
  Gradients grad;
};

/// Row-wise softmax(W x + b) of a batch (rows are samples), stabilised by
/// subtracting the row maximum. Throws on a feature dimension mismatch.
Matrix forward(const SoftmaxModel& model, const Matrix& batch);

/// Mean cross-entropy plus (l2 / 2) ||W||^2, with analytic gradients. The bias
/// is not penalised.
LossAndGrad loss_and_grad(const SoftmaxModel& model, const Matrix& batch,
                          std::span<const int> labels, double l2);

/// Argmax of each row; ties go to the lowest class id.
std::vector<int> argmax_rows(const Matrix& scores);

/// Flattened slices of a store as double rows.
Matrix to_matrix(const io::TensorStore& store, std::span<const std::size_t> rows);
Matrix to_matrix(const io::TensorStore& store);

std::vector<int> predict(const SoftmaxModel& model, const Matrix& features);
std::vector<int> predict(const SoftmaxModel& model, const io::TensorStore& store);

struct EpochRecord {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  SoftmaxModel model;            ///< parameters with the best validation loss
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;    ///< 1-based; 0 means the initial parameters
};

/// SGD with momentum: v <- mu v - eta grad, theta <- theta + v. Stops after
/// `patience` epochs without a strict validation-loss improvement or at
/// max_epochs. Losses in the history are full passes in store order. With an
/// empty validation store the training loss drives early stopping.
TrainResult train(const SoftmaxModel& initial, const io::TensorStore& train_store,
                  const io::TensorStore& val_store, const TrainConfig& config);

/// Mean cross-entropy (with penalty) over a whole store.
double dataset_loss(const SoftmaxModel& model, const io::TensorStore& store, double l2);

}  // namespace ifm::classifier
