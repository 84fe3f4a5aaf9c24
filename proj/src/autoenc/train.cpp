#include "daqn/autoenc/train.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace daqn {

void AeTrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("auto-encoder epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("auto-encoder batch_size must be >= 1");
  optimizer.validate();
}

Json to_json(const AeTrainConfig& cfg) {
  return Json{{"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"optimizer", to_json(cfg.optimizer)},
              {"augmentation", to_json(cfg.augmentation)},
              {"shuffle_seed", cfg.shuffle_seed}};
}

AeTrainConfig ae_train_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("auto-encoder training config must be an object");
  AeTrainConfig cfg;
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  if (j.contains("optimizer")) cfg.optimizer = optimizer_config_from_json(j.at("optimizer"));
  if (j.contains("augmentation")) cfg.augmentation = augment_spec_from_json(j.at("augmentation"));
  cfg.shuffle_seed = j.value("shuffle_seed", cfg.shuffle_seed);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

double reconstruction_mse(AutoEncoder& ae, const Tensor& dataset) {
  const Mode enc_mode = ae.encoder.mode(), dec_mode = ae.decoder.mode();
  ae.encoder.set_mode(Mode::eval);
  ae.decoder.set_mode(Mode::eval);
  auto cols = dataset.columns();
  constexpr Index kChunk = 256;
  double total = 0.0;
  for (Index start = 0; start < cols.cols(); start += kChunk) {
    const Index n = std::min(kChunk, cols.cols() - start);
    const Eigen::MatrixXd x = cols.middleCols(start, n);
    const Eigen::MatrixXd y = ae.decoder.forward_columns(ae.encoder.forward_columns(x));
    total += (y - x).squaredNorm();
  }
  ae.encoder.set_mode(enc_mode);
  ae.decoder.set_mode(dec_mode);
  return total / static_cast<double>(dataset.size());
}

std::vector<double> train_ae(AutoEncoder& ae, const Tensor& dataset, const AeTrainConfig& cfg) {
  cfg.validate();
  if (dataset.rank() < 2 || dataset.shape()[0] == 0) throw std::invalid_argument("auto-encoder dataset is empty");
  const Shape sample(dataset.shape().begin() + 1, dataset.shape().end());
  if (sample != ae.input_shape())
    throw ShapeError("dataset items have shape " + to_string(sample) + ", encoder expects " +
                     to_string(ae.input_shape()));

  std::vector<ParamRef> params = ae.encoder.parameters();
  for (auto& p : ae.decoder.parameters()) params.push_back(p);
  Optimizer opt(cfg.optimizer);
  Rng rng(cfg.shuffle_seed);
  ae.encoder.set_mode(Mode::train);
  ae.decoder.set_mode(Mode::train);

  auto cols = dataset.columns();
  const Index n = cols.cols();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  std::vector<double> curve;
  Eigen::MatrixXd x, grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index b = std::min<Index>(cfg.batch_size, n - start);
      x.resize(cols.rows(), b);
      for (Index i = 0; i < b; ++i) x.col(i) = cols.col(order[static_cast<std::size_t>(start + i)]);
      augment_columns(x, sample, cfg.augmentation, rng);
      const Eigen::MatrixXd y = ae.decoder.forward_columns(ae.encoder.forward_columns(x));
      grad = (2.0 / static_cast<double>(y.size())) * (y - x);
      Eigen::MatrixXd latent_grad;
      ae.decoder.backward_columns(grad, &latent_grad);
      ae.encoder.backward_columns(latent_grad);
      opt.step(params);
    }
    curve.push_back(reconstruction_mse(ae, dataset));
  }
  ae.encoder.set_mode(Mode::eval);
  ae.decoder.set_mode(Mode::eval);
  return curve;
}

}  // namespace daqn
