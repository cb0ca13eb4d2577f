#include "passby/neural.hpp"

#include <cmath>
#include <numeric>

#include "passby/error.hpp"
#include "passby/rng.hpp"

namespace passby {

namespace {

void check_net(const Fcnn& net) {
  if (net.layer_sizes.size() < 2)
    throw config_error("network needs at least input and output layers");
  const std::size_t layers = net.layer_sizes.size() - 1;
  if (net.weights.size() != layers || net.biases.size() != layers)
    throw shape_error("parameter count does not match layer_sizes");
}

void check_batch(const Fcnn& net, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets) {
  if (inputs.rows() < 1) throw validation_error("empty batch");
  if (inputs.cols() != net.input_size())
    throw shape_error("batch has " + std::to_string(inputs.cols()) +
                      " input dims, network expects " +
                      std::to_string(net.input_size()));
  if (targets.rows() != inputs.rows() || targets.cols() != net.output_size())
    throw shape_error("target shape does not match batch/output size");
}

// Forward pass keeping post-activation values of every layer (activations[0]
// is the input batch).
std::vector<Eigen::MatrixXd> forward_trace(const Fcnn& net,
                                           const Eigen::MatrixXd& inputs) {
  const std::size_t layers = net.weights.size();
  std::vector<Eigen::MatrixXd> activations(layers + 1);
  activations[0] = inputs;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = activations[l] * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    activations[l + 1] = std::move(z);
  }
  return activations;
}

double weight_penalty(const Fcnn& net) {
  double sq = 0.0;
  for (const auto& w : net.weights) sq += w.squaredNorm();
  return net.l2_factor * sq;
}

}  // namespace

std::size_t Fcnn::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

Fcnn fcnn_init(const std::vector<int>& layer_sizes, double l2_factor,
               std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw config_error("network needs at least input and output layers");
  for (int s : layer_sizes)
    if (s < 1) throw config_error("layer sizes must be positive");
  if (l2_factor < 0) throw config_error("l2_factor must be nonnegative");

  Fcnn net;
  net.layer_sizes = layer_sizes;
  net.l2_factor = l2_factor;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / fan_in);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

Eigen::VectorXd forward(const Fcnn& net, const Eigen::VectorXd& x) {
  check_net(net);
  if (x.size() != net.input_size())
    throw shape_error("input has " + std::to_string(x.size()) +
                      " dims, network expects " +
                      std::to_string(net.input_size()));
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
    a = (l + 1 == net.weights.size()) ? z : z.cwiseMax(0.0).eval();
  }
  return a;
}

Eigen::MatrixXd predict(const Fcnn& net, const Eigen::MatrixXd& inputs) {
  check_net(net);
  if (inputs.cols() != net.input_size())
    throw shape_error("batch has " + std::to_string(inputs.cols()) +
                      " input dims, network expects " +
                      std::to_string(net.input_size()));
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Eigen::MatrixXd z = a * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    a = (l + 1 == net.weights.size()) ? std::move(z) : z.cwiseMax(0.0).eval();
  }
  return a;
}

double loss(const Fcnn& net, const Eigen::MatrixXd& inputs,
            const Eigen::MatrixXd& targets) {
  check_net(net);
  check_batch(net, inputs, targets);
  const Eigen::MatrixXd pred = predict(net, inputs);
  const double data = (pred - targets).squaredNorm() /
                      static_cast<double>(inputs.rows());
  return data + weight_penalty(net);
}

Gradients backward(const Fcnn& net, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets) {
  check_net(net);
  check_batch(net, inputs, targets);
  const std::size_t layers = net.weights.size();
  const auto activations = forward_trace(net, inputs);

  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);

  const double inv_n = 1.0 / static_cast<double>(inputs.rows());
  Eigen::MatrixXd delta = 2.0 * inv_n * (activations[layers] - targets);
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = delta.transpose() * activations[l] +
                       2.0 * net.l2_factor * net.weights[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * net.weights[l]).eval();
      // activations[l] is the post-ReLU output of a hidden layer, so the mask
      // a > 0 equals relu'(z) with relu'(0) := 0.
      delta.array() *= (activations[l].array() > 0.0).cast<double>();
    }
  }
  return grads;
}

std::pair<Fcnn, TrainReport> train(Fcnn net, const Eigen::MatrixXd& train_x,
                                   const Eigen::MatrixXd& train_y,
                                   const Eigen::MatrixXd& val_x,
                                   const Eigen::MatrixXd& val_y,
                                   const TrainConfig& cfg) {
  check_net(net);
  check_batch(net, train_x, train_y);
  check_batch(net, val_x, val_y);
  if (cfg.epochs < 1) throw config_error("epochs must be >= 1");
  if (cfg.batch_size < 1) throw config_error("batch_size must be >= 1");
  if (cfg.learning_rate < 0) throw config_error("learning_rate must be >= 0");
  if (!(cfg.beta1 >= 0 && cfg.beta1 < 1 && cfg.beta2 >= 0 && cfg.beta2 < 1))
    throw config_error("Adam betas must lie in [0, 1)");

  const std::size_t layers = net.weights.size();
  std::vector<Eigen::MatrixXd> mw(layers), vw(layers);
  std::vector<Eigen::VectorXd> mb(layers), vb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    mw[l] = Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols());
    vw[l] = mw[l];
    mb[l] = Eigen::VectorXd::Zero(net.biases[l].size());
    vb[l] = mb[l];
  }

  const long n = train_x.rows();
  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  Rng rng(cfg.seed);

  TrainReport report;
  report.train_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  report.val_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  Fcnn best = net;
  double best_val = std::numeric_limits<double>::infinity();
  long step = 0;
  Eigen::MatrixXd batch_x, batch_y;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double data_loss_sum = 0.0;
    for (long begin = 0; begin < n; begin += cfg.batch_size) {
      const long count = std::min<long>(cfg.batch_size, n - begin);
      batch_x.resize(count, train_x.cols());
      batch_y.resize(count, train_y.cols());
      for (long i = 0; i < count; ++i) {
        batch_x.row(i) = train_x.row(order[static_cast<std::size_t>(begin + i)]);
        batch_y.row(i) = train_y.row(order[static_cast<std::size_t>(begin + i)]);
      }

      const auto activations = forward_trace(net, batch_x);
      const double inv_b = 1.0 / static_cast<double>(count);
      Eigen::MatrixXd delta =
          2.0 * inv_b * (activations[layers] - batch_y);
      data_loss_sum +=
          (activations[layers] - batch_y).squaredNorm();  // pre-update loss

      ++step;
      const double corr1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd gw = delta.transpose() * activations[l] +
                                   2.0 * net.l2_factor * net.weights[l];
        const Eigen::VectorXd gb = delta.colwise().sum().transpose();
        if (l > 0) {
          delta = (delta * net.weights[l]).eval();
          delta.array() *= (activations[l].array() > 0.0).cast<double>();
        }
        mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * gw;
        vw[l] = cfg.beta2 * vw[l] + (1.0 - cfg.beta2) * gw.array().square().matrix();
        mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * gb;
        vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * gb.array().square().matrix();
        net.weights[l].array() -=
            cfg.learning_rate * (mw[l].array() / corr1) /
            ((vw[l].array() / corr2).sqrt() + cfg.adam_epsilon);
        net.biases[l].array() -=
            cfg.learning_rate * (mb[l].array() / corr1) /
            ((vb[l].array() / corr2).sqrt() + cfg.adam_epsilon);
      }
    }

    const double train_loss =
        data_loss_sum / static_cast<double>(n) + weight_penalty(net);
    const double val_loss = loss(net, val_x, val_y);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw train_error("training diverged at epoch " + std::to_string(epoch));
    report.train_loss.push_back(train_loss);
    report.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best = net;
      report.best_epoch = epoch;
    }
  }
  return {std::move(best), std::move(report)};
}

}  // namespace passby
