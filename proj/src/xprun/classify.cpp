#include "daqn/xprun/classify.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "daqn/nnkit/serialize.hpp"

namespace daqn {
namespace {

std::vector<LayerSpec> conv_relu(int in, int out, int k) { return {LayerSpec::conv2d(in, out, k), LayerSpec::relu()}; }

void append(std::vector<LayerSpec>& to, const std::vector<LayerSpec>& more) { to.insert(to.end(), more.begin(), more.end()); }

Eigen::MatrixXd gather(const Eigen::Map<const Eigen::MatrixXd>& cols, std::span<const int> idx) {
  Eigen::MatrixXd out(cols.rows(), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Index>(i)) = cols.col(idx[i]);
  return out;
}

}  // namespace

NetworkSpec table_network(std::string_view id, int image_size, const TableWidths& w) {
  const auto known = std::find(std::begin(kTableNetworkIds), std::end(kTableNetworkIds), id);
  if (known == std::end(kTableNetworkIds))
    throw ConfigError("unknown network id '" + std::string(id) + "' (expected one of i, ii, iii, iv, v)");
  const auto pool = LayerSpec::maxpool2d(2);
  std::vector<LayerSpec> layers = conv_relu(1, w.c1, 5);
  layers.push_back(pool);
  if (id == "i") {
    append(layers, conv_relu(w.c1, w.c2, 5));
    layers.push_back(pool);
  } else {
    append(layers, conv_relu(w.c1, w.c2, 3));
    append(layers, conv_relu(w.c2, w.c2, 3));
    if (id != "ii") layers.push_back(pool);
    if (id == "v") layers.push_back(LayerSpec::dropout(w.dropout));
    if (id == "iv" || id == "v") {
      append(layers, conv_relu(w.c2, w.c3, 2));
      layers.push_back(pool);
    }
    if (id == "v") layers.push_back(LayerSpec::dropout(w.dropout));
  }
  layers.push_back(LayerSpec::flatten());
  NetworkSpec spec{{1, image_size, image_size}, layers};
  const int flat = shape_chain(spec).back()[0];
  if (id == "v") {
    spec.layers.push_back(LayerSpec::dense(flat, w.hidden));
    spec.layers.push_back(LayerSpec::relu());
    spec.layers.push_back(LayerSpec::dense(w.hidden, kGlyphClasses));
  } else {
    spec.layers.push_back(LayerSpec::dense(flat, kGlyphClasses));
  }
  spec.layers.push_back(LayerSpec::softmax());
  shape_chain(spec);
  return spec;
}

GlyphClassData make_classification_data(const GlyphDuelConfig& cfg, int n, std::uint64_t seed) {
  if (n < kGlyphClasses) throw ConfigError("classification needs at least one image per class");
  Rng rng(seed);
  std::vector<Tensor> items;
  GlyphClassData data;
  for (int i = 0; i < n; ++i) {
    const int label = i % kGlyphClasses;
    items.push_back(glyph_render(static_cast<Glyph>(label), rng(), cfg));
    data.labels.push_back(label);
  }
  data.images = stack(items);
  return data;
}

double classification_accuracy(Network& net, const Tensor& images, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const Mode before = net.mode();
  net.set_mode(Mode::eval);
  const auto cols = images.columns();
  long correct = 0;
  constexpr Index chunk = 256;
  for (Index start = 0; start < cols.cols(); start += chunk) {
    const Index len = std::min(chunk, cols.cols() - start);
    const Eigen::MatrixXd p = net.forward_columns(cols.middleCols(start, len));
    for (Index j = 0; j < len; ++j) {
      Index arg;
      p.col(j).maxCoeff(&arg);
      correct += arg == labels[static_cast<std::size_t>(start + j)];
    }
  }
  net.set_mode(before);
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

ClassifyResult classify_experiment(const ClassifyConfig& cfg, const std::function<void(int, double, double)>& on_epoch) {
  if (cfg.epochs < 0 || cfg.batch_size < 1) throw ConfigError("epochs must be >= 0 and batch_size >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  ClassifyResult result;
  result.spec = table_network(cfg.net, cfg.glyph.image_size, cfg.widths);
  const GlyphClassData data = make_classification_data(cfg.glyph, cfg.n_items, cfg.seed);

  Rng rng(cfg.seed ^ 0xc1a5'51f7ULL);
  std::vector<int> order(static_cast<std::size_t>(cfg.n_items));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::max(1.0, std::round(cfg.test_fraction * cfg.n_items)));
  if (n_test >= order.size()) throw ConfigError("test split leaves no training images");
  std::vector<int> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<int> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  result.n_test = static_cast<int>(test_idx.size());
  result.n_train = static_cast<int>(train_idx.size());

  const auto all = data.images.columns();
  const Eigen::MatrixXd test_cols = gather(all, test_idx);
  std::vector<int> test_labels;
  for (int i : test_idx) test_labels.push_back(data.labels[static_cast<std::size_t>(i)]);
  const Tensor test_images = from_columns(test_cols, result.spec.input_shape);

  Network net(result.spec, cfg.seed + 1);
  Optimizer opt(cfg.optimizer);
  result.initial_accuracy = classification_accuracy(net, test_images, test_labels);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    net.set_mode(Mode::train);
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t len = std::min(static_cast<std::size_t>(cfg.batch_size), train_idx.size() - start);
      const std::span<const int> idx(train_idx.data() + start, len);
      const Eigen::MatrixXd p = net.forward_columns(gather(all, idx));
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(p.rows(), p.cols());
      for (std::size_t j = 0; j < len; ++j) {
        const Index col = static_cast<Index>(j);
        const double py = std::max(p(data.labels[static_cast<std::size_t>(idx[j])], col), 1e-12);
        loss_sum -= std::log(py);
        grad(data.labels[static_cast<std::size_t>(idx[j])], col) = -1.0 / (py * static_cast<double>(len));
      }
      net.backward_columns(grad);
      opt.step(net);
    }
    result.train_loss.push_back(loss_sum / static_cast<double>(train_idx.size()));
    result.test_accuracy.push_back(classification_accuracy(net, test_images, test_labels));
    if (on_epoch) on_epoch(epoch, result.train_loss.back(), result.test_accuracy.back());
  }
  return result;
}

}  // namespace daqn
