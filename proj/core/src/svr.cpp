#include "passby/svr.hpp"

#include <cmath>
#include <limits>

#include "passby/error.hpp"

namespace passby {

namespace {

constexpr double kCurvatureFloor = 1e-12;

double auto_gamma(const Eigen::MatrixXd& xs) {
  const double var = (xs.array() - xs.mean()).square().mean();
  const double d = static_cast<double>(xs.cols());
  return var > 0 ? 1.0 / (d * var) : 1.0 / d;
}

Eigen::MatrixXd kernel_matrix(KernelKind kind, double gamma,
                              const Eigen::MatrixXd& xs) {
  if (kind == KernelKind::Linear) return xs * xs.transpose();
  const Eigen::VectorXd sq = xs.rowwise().squaredNorm();
  Eigen::MatrixXd dist = -2.0 * (xs * xs.transpose());
  dist.colwise() += sq;
  dist.rowwise() += sq.transpose();
  return (-gamma * dist.cwiseMax(0.0)).array().exp();
}

Eigen::VectorXd kernel_against(KernelKind kind, double gamma,
                               const Eigen::MatrixXd& rows,
                               const Eigen::VectorXd& x) {
  if (kind == KernelKind::Linear) return rows * x;
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    out(i) = std::exp(-gamma * (rows.row(i).transpose() - x).squaredNorm());
  return out;
}

void check_config(const SvrConfig& cfg) {
  if (!(cfg.c > 0)) throw config_error("SVR C must be positive");
  if (cfg.epsilon < 0) throw config_error("SVR epsilon must be nonnegative");
  if (!(cfg.tolerance > 0)) throw config_error("SVR tolerance must be positive");
  if (cfg.max_passes < 1) throw config_error("SVR max_passes must be >= 1");
}

// Maximal violating pair over the 2n-variable dual. For each training point
// the alpha-side candidate value is -F_i - eps and the alpha*-side value is
// -F_i + eps, where F_i = (K beta)_i - y_i.
struct Pair {
  double m = -std::numeric_limits<double>::infinity();
  double big_m = std::numeric_limits<double>::infinity();
  long up_index = -1;
  bool up_is_alpha = true;
  long low_index = -1;
  bool low_is_alpha = true;
};

Pair select_pair(const Eigen::VectorXd& alpha, const Eigen::VectorXd& alpha_star,
                 const Eigen::VectorXd& f, double c, double eps) {
  Pair p;
  const long n = f.size();
  for (long i = 0; i < n; ++i) {
    const double lo_val = -f(i) - eps;  // alpha side
    const double hi_val = -f(i) + eps;  // alpha* side
    if (alpha(i) < c && lo_val > p.m) {
      p.m = lo_val;
      p.up_index = i;
      p.up_is_alpha = true;
    }
    if (alpha_star(i) > 0 && hi_val > p.m) {
      p.m = hi_val;
      p.up_index = i;
      p.up_is_alpha = false;
    }
    if (alpha(i) > 0 && lo_val < p.big_m) {
      p.big_m = lo_val;
      p.low_index = i;
      p.low_is_alpha = true;
    }
    if (alpha_star(i) < c && hi_val < p.big_m) {
      p.big_m = hi_val;
      p.low_index = i;
      p.low_is_alpha = false;
    }
  }
  return p;
}

}  // namespace

std::string kernel_kind_name(KernelKind kind) {
  return kind == KernelKind::Rbf ? "rbf" : "linear";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "rbf") return KernelKind::Rbf;
  if (name == "linear") return KernelKind::Linear;
  throw config_error("unknown kernel '" + name + "' (expected rbf|linear)");
}

SvrModel svr_train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const SvrConfig& cfg) {
  check_config(cfg);
  if (x.rows() < 2) throw validation_error("SVR needs at least two training points");
  if (y.size() != x.rows())
    throw shape_error("targets length " + std::to_string(y.size()) +
                      " does not match " + std::to_string(x.rows()) + " rows");
  if (!x.allFinite() || !y.allFinite())
    throw validation_error("SVR training data must be finite");

  SvrModel model;
  model.kernel = cfg.kernel;
  model.c = cfg.c;
  model.epsilon = cfg.epsilon;
  model.x_scaler = Scaler::fit(x);
  model.y_scaler = TargetScaler::fit(y);

  const Eigen::MatrixXd xs = model.x_scaler.transform(x);
  const long n = xs.rows();
  Eigen::VectorXd ys(n);
  for (long i = 0; i < n; ++i) ys(i) = model.y_scaler.transform(y(i));

  model.gamma = cfg.gamma > 0 ? cfg.gamma : auto_gamma(xs);
  const Eigen::MatrixXd k = kernel_matrix(cfg.kernel, model.gamma, xs);

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd alpha_star = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = -ys;  // F_i = (K beta)_i - y_i

  auto dual_objective = [&]() {
    // Maximization form; the SMO steps only ever increase it.
    return -(0.5 * beta.dot(f) - 0.5 * beta.dot(ys) +
             cfg.epsilon * beta.lpNorm<1>());
  };
  if (cfg.track_objective) model.objective.push_back(dual_objective());

  model.converged = false;
  Pair pair;
  for (long pass = 0; pass < cfg.max_passes; ++pass) {
    pair = select_pair(alpha, alpha_star, f, cfg.c, cfg.epsilon);
    if (pair.m - pair.big_m <= cfg.tolerance) {
      model.converged = true;
      break;
    }
    const long p = pair.up_index;
    const long q = pair.low_index;
    const double curvature = std::max(k(p, p) + k(q, q) - 2.0 * k(p, q),
                                      kCurvatureFloor);
    double t = (pair.m - pair.big_m) / curvature;
    t = std::min(t, pair.up_is_alpha ? cfg.c - alpha(p) : alpha_star(p));
    t = std::min(t, pair.low_is_alpha ? alpha(q) : cfg.c - alpha_star(q));
    if (pair.up_is_alpha) alpha(p) += t; else alpha_star(p) -= t;
    if (pair.low_is_alpha) alpha(q) -= t; else alpha_star(q) += t;
    beta(p) += t;
    beta(q) -= t;
    f += t * (k.col(p) - k.col(q));
    if (cfg.track_objective) model.objective.push_back(dual_objective());
  }
  if (model.converged) {
    pair = select_pair(alpha, alpha_star, f, cfg.c, cfg.epsilon);
  }
  model.bias = 0.5 * (pair.m + pair.big_m);

  long n_sv = 0;
  for (long i = 0; i < n; ++i)
    if (beta(i) != 0.0) ++n_sv;
  model.support_vectors.resize(n_sv, xs.cols());
  model.coefficients.resize(n_sv);
  model.sv_indices.reserve(static_cast<std::size_t>(n_sv));
  long row = 0;
  for (long i = 0; i < n; ++i) {
    if (beta(i) == 0.0) continue;
    model.support_vectors.row(row) = xs.row(i);
    model.coefficients(row) = beta(i);
    model.sv_indices.push_back(i);
    ++row;
  }
  return model;
}

double svr_predict(const SvrModel& model, const Eigen::VectorXd& x) {
  const Eigen::VectorXd xs = model.x_scaler.transform_vector(x);
  double value = model.bias;
  if (model.support_vectors.rows() > 0)
    value += model.coefficients.dot(
        kernel_against(model.kernel, model.gamma, model.support_vectors, xs));
  return model.y_scaler.inverse(value);
}

Eigen::VectorXd svr_predict(const SvrModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i) = svr_predict(model, x.row(i).transpose());
  return out;
}

double kkt_violation(const SvrModel& model, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& y, const SvrConfig&) {
  if (x.cols() != model.dims())
    throw shape_error("feature dims do not match the model");
  if (y.size() != x.rows()) throw shape_error("targets do not match rows");
  const Eigen::MatrixXd xs = model.x_scaler.transform(x);
  const long n = xs.rows();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < model.sv_indices.size(); ++j) {
    const long i = model.sv_indices[j];
    if (i < 0 || i >= n)
      throw validation_error("model support-vector index out of range");
    beta(i) = model.coefficients(static_cast<Eigen::Index>(j));
  }

  Eigen::VectorXd f(n);
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    if (model.support_vectors.rows() > 0)
      acc = model.coefficients.dot(
          kernel_against(model.kernel, model.gamma, model.support_vectors,
                         xs.row(i).transpose()));
    f(i) = acc - model.y_scaler.transform(y(i));
  }

  const Eigen::VectorXd alpha = beta.cwiseMax(0.0);
  const Eigen::VectorXd alpha_star = (-beta).cwiseMax(0.0);
  double violation = 0.0;
  for (long i = 0; i < n; ++i) {
    const double lo_val = -f(i) - model.epsilon;
    const double hi_val = -f(i) + model.epsilon;
    if (alpha(i) < model.c)
      violation = std::max(violation, lo_val - model.bias);
    if (alpha_star(i) > 0)
      violation = std::max(violation, hi_val - model.bias);
    if (alpha(i) > 0)
      violation = std::max(violation, model.bias - lo_val);
    if (alpha_star(i) < model.c)
      violation = std::max(violation, model.bias - hi_val);
  }
  return violation;
}

}  // namespace passby
