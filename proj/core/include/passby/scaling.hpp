#pragma once

#include <Eigen/Dense>

#include "passby/error.hpp"

namespace passby {

// Per-dimension standardization fit on training data (population statistics).
// Dimensions with (near-)zero spread get std 1 so constant features map to 0
// instead of dividing by zero.
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static Scaler fit(const Eigen::MatrixXd& samples) {
    if (samples.rows() < 1) throw validation_error("cannot fit scaler on empty data");
    Scaler s;
    s.mean = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
    s.std = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index i = 0; i < s.std.size(); ++i)
      if (!(s.std(i) > 1e-12)) s.std(i) = 1.0;
    return s;
  }

  Eigen::Index dims() const { return mean.size(); }

  void apply_in_place(Eigen::MatrixXd& samples) const {
    if (samples.cols() != mean.size())
      throw shape_error("scaler expects " + std::to_string(mean.size()) +
                        " dims, got " + std::to_string(samples.cols()));
    samples.rowwise() -= mean.transpose();
    samples.array().rowwise() /= std.transpose().array();
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& samples) const {
    Eigen::MatrixXd out = samples;
    apply_in_place(out);
    return out;
  }

  Eigen::VectorXd transform_vector(const Eigen::VectorXd& x) const {
    if (x.size() != mean.size())
      throw shape_error("scaler expects " + std::to_string(mean.size()) +
                        " dims, got " + std::to_string(x.size()));
    return (x - mean).cwiseQuotient(std);
  }
};

// One-dimensional variant used for regression targets.
struct TargetScaler {
  double mean = 0.0;
  double std = 1.0;

  static TargetScaler fit(const Eigen::VectorXd& y) {
    if (y.size() < 1) throw validation_error("cannot fit scaler on empty targets");
    TargetScaler s;
    s.mean = y.mean();
    const double var = (y.array() - s.mean).square().mean();
    s.std = std::sqrt(var);
    if (!(s.std > 1e-12)) s.std = 1.0;
    return s;
  }

  double transform(double v) const { return (v - mean) / std; }
  double inverse(double v) const { return mean + std * v; }
};

}  // namespace passby
