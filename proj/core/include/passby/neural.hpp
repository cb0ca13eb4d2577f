#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace passby {

// Fully connected network: ReLU on hidden layers, linear output. weights[l]
// maps layer l (cols) to layer l+1 (rows); sample batches are row-major
// (one sample per row).
struct Fcnn {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  double l2_factor = 0.0;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 64;
  double learning_rate = 1e-3;  // Adam; 0 is allowed and leaves parameters fixed
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
};

// train_loss[e] is the batch-size-weighted mean of pre-update mini-batch data
// losses plus the L2 penalty at epoch end; val_loss[e] is a full pass over the
// validation set after epoch e.
struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = 0;  // epoch with the lowest validation loss (first on ties)
};

// He-uniform weights (limit sqrt(6/fan_in)), zero biases, deterministic per seed.
Fcnn fcnn_init(const std::vector<int>& layer_sizes, double l2_factor,
               std::uint64_t seed);

Eigen::VectorXd forward(const Fcnn& net, const Eigen::VectorXd& x);

// Batched forward: inputs n x d_in, result n x d_out.
Eigen::MatrixXd predict(const Fcnn& net, const Eigen::MatrixXd& inputs);

// Mean over samples of the squared error (summed over output dims) plus
// l2_factor * sum of squared weights (biases are not penalized).
double loss(const Fcnn& net, const Eigen::MatrixXd& inputs,
            const Eigen::MatrixXd& targets);

// Exact gradient of `loss`; ReLU subgradient at 0 is taken as 0.
Gradients backward(const Fcnn& net, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets);

// Mini-batch Adam with per-epoch seeded shuffling; returns the parameters from
// the best-validation epoch. Non-finite loss raises train_error naming the epoch.
std::pair<Fcnn, TrainReport> train(Fcnn net, const Eigen::MatrixXd& train_x,
                                   const Eigen::MatrixXd& train_y,
                                   const Eigen::MatrixXd& val_x,
                                   const Eigen::MatrixXd& val_y,
                                   const TrainConfig& cfg);

}  // namespace passby
