#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "passby/scaling.hpp"

namespace passby {

enum class KernelKind { Rbf, Linear };

std::string kernel_kind_name(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& name);

struct SvrConfig {
  double c = 150.0;
  double epsilon = 0.1;  // tube half-width on standardized targets
  KernelKind kernel = KernelKind::Rbf;
  double gamma = 0.0;  // <= 0 selects 1/(d * var) on standardized features
  double tolerance = 1e-3;
  long max_passes = 200000;  // cap on pair updates; hitting it clears `converged`
  bool track_objective = false;
};

// Trained model. Features and targets are standardized internally; support
// vectors are stored in standardized feature space and `bias` lives in
// standardized target space.
struct SvrModel {
  KernelKind kernel = KernelKind::Rbf;
  double gamma = 0.0;
  double c = 0.0;
  double epsilon = 0.0;
  Eigen::MatrixXd support_vectors;   // n_sv x d, standardized
  Eigen::VectorXd coefficients;      // alpha - alpha*, nonzero, in [-C, C]
  std::vector<long> sv_indices;      // rows of the training set
  double bias = 0.0;
  Scaler x_scaler;
  TargetScaler y_scaler;
  bool converged = true;
  std::vector<double> objective;     // dual objective trace when tracked

  Eigen::Index dims() const { return x_scaler.dims(); }
};

// Solves the epsilon-SVR dual by maximal-violating-pair SMO until the largest
// KKT violation is within cfg.tolerance or cfg.max_passes updates were spent.
SvrModel svr_train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const SvrConfig& cfg);

double svr_predict(const SvrModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd svr_predict(const SvrModel& model, const Eigen::MatrixXd& x);

// Largest KKT violation of the model's dual solution on its training set,
// measured against the stored bias. A converged model stays within
// cfg.tolerance.
double kkt_violation(const SvrModel& model, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y, const SvrConfig& cfg);

}  // namespace passby
