#include "daqn/nnkit/layers.hpp"

#include <cmath>

namespace daqn {
namespace {

void uniform_fill(Tensor& t, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Index i = 0; i < t.size(); ++i) t[i] = dist(rng);
}

// He-uniform ahead of a ReLU, Glorot-uniform otherwise.
double init_limit(int fan_in, int fan_out, bool followed_by_relu) {
  return followed_by_relu ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
}

class Dense final : public Layer {
 public:
  Dense(const LayerSpec& spec, const Shape& in, const Shape& out)
      : Layer(spec, in, out),
        weight_({spec.out_units, spec.in_units}),
        weight_grad_(weight_.shape()),
        bias_({spec.out_units}),
        bias_grad_(bias_.shape()) {}

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override {
    input_ = x;
    y.noalias() = w() * x;
    if (spec().bias) y.colwise() += bias_.data();
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    Eigen::Map<RowMatrix> dw(weight_grad_.data().data(), spec().out_units, spec().in_units);
    dw.noalias() = g * input_.transpose();
    if (spec().bias)
      bias_grad_.data() = g.rowwise().sum();
    else
      bias_grad_.data().setZero();
    if (grad_in) grad_in->noalias() = w().transpose() * g;
  }

  std::vector<Tensor*> params() override {
    if (!spec().bias) return {&weight_};
    return {&weight_, &bias_};
  }
  std::vector<Tensor*> grads() override {
    if (!spec().bias) return {&weight_grad_};
    return {&weight_grad_, &bias_grad_};
  }

  void init_params(Rng& rng, bool followed_by_relu) override {
    uniform_fill(weight_, init_limit(spec().in_units, spec().out_units, followed_by_relu), rng);
    bias_.data().setZero();
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

 private:
  Eigen::Map<const RowMatrix> w() const {
    return {weight_.data().data(), spec().out_units, spec().in_units};
  }

  Tensor weight_, weight_grad_, bias_, bias_grad_;
  Eigen::MatrixXd input_;
};

class Conv2d final : public Layer {
 public:
  Conv2d(const LayerSpec& spec, const Shape& in, const Shape& out)
      : Layer(spec, in, out),
        weight_({spec.out_channels, spec.in_channels, spec.kernel_size, spec.kernel_size}),
        weight_grad_(weight_.shape()),
        bias_({spec.out_channels}),
        bias_grad_(bias_.shape()) {}

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override {
    in_rows_ = x.rows();
    const Index npix = pixels(), kl = patch_len();
    y.resize(shape_size(output_shape()), x.cols());
    // Patches of every sample stay cached for the backward pass.
    patches_.resize(npix, kl * x.cols());
    for (Index n = 0; n < x.cols(); ++n) {
      auto p = patches_.middleCols(n * kl, kl);
      im2col(x.col(n).data(), p.data());
      Eigen::Map<Eigen::MatrixXd> out(y.col(n).data(), npix, spec().out_channels);
      out.noalias() = p * wt();
      out.rowwise() += bias_.data().transpose();
    }
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    const Index npix = pixels();
    Eigen::Map<Eigen::MatrixXd> dwt(weight_grad_.data().data(), patch_len(), spec().out_channels);
    dwt.setZero();
    bias_grad_.data().setZero();
    if (grad_in) grad_in->setZero(in_rows_, g.cols());
    const Index kl = patch_len();
    Eigen::MatrixXd dpatches;
    for (Index n = 0; n < g.cols(); ++n) {
      Eigen::Map<const Eigen::MatrixXd> go(g.col(n).data(), npix, spec().out_channels);
      dwt.noalias() += patches_.middleCols(n * kl, kl).transpose() * go;
      bias_grad_.data() += go.colwise().sum().transpose();
      if (grad_in) {
        dpatches.noalias() = go * wt().transpose();
        col2im(dpatches, grad_in->col(n).data());
      }
    }
  }

  std::vector<Tensor*> params() override { return {&weight_, &bias_}; }
  std::vector<Tensor*> grads() override { return {&weight_grad_, &bias_grad_}; }

  void init_params(Rng& rng, bool followed_by_relu) override {
    const int kk = spec().kernel_size * spec().kernel_size;
    uniform_fill(weight_, init_limit(spec().in_channels * kk, spec().out_channels * kk, followed_by_relu), rng);
    bias_.data().setZero();
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }

 private:
  Index pixels() const { return Index{output_shape()[1]} * output_shape()[2]; }
  Index patch_len() const { return Index{spec().in_channels} * spec().kernel_size * spec().kernel_size; }

  // Transposed weight view: (C*k*k) x OC, aliasing the row-major [OC, C, k, k] storage.
  Eigen::Map<const Eigen::MatrixXd> wt() const {
    return {weight_.data().data(), patch_len(), spec().out_channels};
  }

  // patches(pixel, (c*k + ky)*k + kx) = padded input at that tap.
  void im2col(const double* x, double* patches) const {
    const int c_in = spec().in_channels, k = spec().kernel_size, s = spec().stride, p = spec().padding;
    const int h = input_shape()[1], w = input_shape()[2];
    const int oh = output_shape()[1], ow = output_shape()[2];
    const Index npix = pixels();
    for (int c = 0; c < c_in; ++c)
      for (int ky = 0; ky < k; ++ky)
        for (int kx = 0; kx < k; ++kx) {
          double* col = patches + ((c * k + ky) * k + kx) * npix;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * s + ky - p;
            double* dst = col + oy * ow;
            if (iy < 0 || iy >= h) {
              std::fill(dst, dst + ow, 0.0);
              continue;
            }
            const double* row = x + (c * h + iy) * w;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * s + kx - p;
              dst[ox] = (ix >= 0 && ix < w) ? row[ix] : 0.0;
            }
          }
        }
  }

  void col2im(const Eigen::MatrixXd& dpatches, double* dx) const {
    const int c_in = spec().in_channels, k = spec().kernel_size, s = spec().stride, p = spec().padding;
    const int h = input_shape()[1], w = input_shape()[2];
    const int oh = output_shape()[1], ow = output_shape()[2];
    for (int c = 0; c < c_in; ++c)
      for (int ky = 0; ky < k; ++ky)
        for (int kx = 0; kx < k; ++kx) {
          const double* col = dpatches.col((c * k + ky) * k + kx).data();
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * s + ky - p;
            if (iy < 0 || iy >= h) continue;
            double* row = dx + (c * h + iy) * w;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * s + kx - p;
              if (ix >= 0 && ix < w) row[ix] += col[oy * ow + ox];
            }
          }
        }
  }

  Tensor weight_, weight_grad_, bias_, bias_grad_;
  Index in_rows_ = 0;
  Eigen::MatrixXd patches_;
};

class MaxPool2d final : public Layer {
 public:
  using Layer::Layer;

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override {
    const int c_n = input_shape()[0], h = input_shape()[1], w = input_shape()[2];
    const int oh = output_shape()[1], ow = output_shape()[2];
    const int win = spec().window, s = spec().stride;
    in_rows_ = x.rows();
    y.resize(shape_size(output_shape()), x.cols());
    argmax_.resize(y.rows(), x.cols());
    for (Index n = 0; n < x.cols(); ++n) {
      const double* xs = x.col(n).data();
      for (int c = 0; c < c_n; ++c)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox) {
            Index best = (Index{c} * h + oy * s) * w + ox * s;
            for (int dy = 0; dy < win; ++dy)
              for (int dx = 0; dx < win; ++dx) {
                const Index idx = (Index{c} * h + oy * s + dy) * w + ox * s + dx;
                if (xs[idx] > xs[best]) best = idx;
              }
            const Index o = (Index{c} * oh + oy) * ow + ox;
            y(o, n) = xs[best];
            argmax_(o, n) = best;
          }
    }
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    if (!grad_in) return;
    grad_in->setZero(in_rows_, g.cols());
    for (Index n = 0; n < g.cols(); ++n)
      for (Index o = 0; o < g.rows(); ++o) (*grad_in)(argmax_(o, n), n) += g(o, n);
  }

  void append_signature(std::vector<std::int64_t>& sig) const override {
    sig.insert(sig.end(), argmax_.data(), argmax_.data() + argmax_.size());
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2d>(*this); }

 private:
  Index in_rows_ = 0;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> argmax_;
};

class Upsample2d final : public Layer {
 public:
  using Layer::Layer;

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override {
    const int c_n = input_shape()[0], h = input_shape()[1], w = input_shape()[2];
    const int f = spec().factor, oh = h * f, ow = w * f;
    y.resize(shape_size(output_shape()), x.cols());
    for (Index n = 0; n < x.cols(); ++n)
      for (int c = 0; c < c_n; ++c)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox)
            y((Index{c} * oh + oy) * ow + ox, n) = x((Index{c} * h + oy / f) * w + ox / f, n);
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    if (!grad_in) return;
    const int c_n = input_shape()[0], h = input_shape()[1], w = input_shape()[2];
    const int f = spec().factor, oh = h * f, ow = w * f;
    grad_in->setZero(shape_size(input_shape()), g.cols());
    for (Index n = 0; n < g.cols(); ++n)
      for (int c = 0; c < c_n; ++c)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox)
            (*grad_in)((Index{c} * h + oy / f) * w + ox / f, n) += g((Index{c} * oh + oy) * ow + ox, n);
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Upsample2d>(*this); }
};

class Relu final : public Layer {
 public:
  using Layer::Layer;

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override {
    active_ = (x.array() > 0.0).cast<double>();
    y = x.cwiseMax(0.0);
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    if (grad_in) *grad_in = g.cwiseProduct(active_);
  }

  void append_signature(std::vector<std::int64_t>& sig) const override {
    for (Index i = 0; i < active_.size(); ++i) sig.push_back(active_.data()[i] > 0.0 ? 1 : 0);
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Relu>(*this); }

 private:
  Eigen::MatrixXd active_;  // 1 where the input was positive
};

// Inverted dropout: kept units are scaled by 1/(1-rate) at train time.
class Dropout final : public Layer {
 public:
  using Layer::Layer;

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool train, Rng& rng) override {
    masked_ = train && spec().rate > 0.0;
    if (!masked_) {
      y = x;
      return;
    }
    const double keep = 1.0 - spec().rate;
    std::bernoulli_distribution coin(keep);
    mask_.resize(x.rows(), x.cols());
    for (Index i = 0; i < mask_.size(); ++i) mask_.data()[i] = coin(rng) ? 1.0 / keep : 0.0;
    y = x.cwiseProduct(mask_);
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    if (!grad_in) return;
    *grad_in = masked_ ? Eigen::MatrixXd(g.cwiseProduct(mask_)) : g;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dropout>(*this); }

 private:
  bool masked_ = false;
  Eigen::MatrixXd mask_;
};

class Flatten final : public Layer {
 public:
  using Layer::Layer;
  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override { y = x; }
  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    if (grad_in) *grad_in = g;
  }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }
};

class Softmax final : public Layer {
 public:
  using Layer::Layer;

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool, Rng&) override {
    y.resize(x.rows(), x.cols());
    for (Index n = 0; n < x.cols(); ++n) {
      const double m = x.col(n).maxCoeff();
      y.col(n) = (x.col(n).array() - m).exp();
      y.col(n) /= y.col(n).sum();
    }
    output_ = y;
  }

  void backward(const Eigen::MatrixXd& g, Eigen::MatrixXd* grad_in) override {
    if (!grad_in) return;
    grad_in->resize(g.rows(), g.cols());
    for (Index n = 0; n < g.cols(); ++n) {
      const double dot = output_.col(n).dot(g.col(n));
      grad_in->col(n) = output_.col(n).cwiseProduct((g.col(n).array() - dot).matrix());
    }
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Softmax>(*this); }

 private:
  Eigen::MatrixXd output_;
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input_shape, int index) {
  Shape out = infer_output_shape(spec, input_shape, index);
  switch (spec.kind) {
    case LayerKind::dense: return std::make_unique<Dense>(spec, input_shape, out);
    case LayerKind::conv2d: return std::make_unique<Conv2d>(spec, input_shape, out);
    case LayerKind::maxpool2d: return std::make_unique<MaxPool2d>(spec, input_shape, out);
    case LayerKind::upsample2d: return std::make_unique<Upsample2d>(spec, input_shape, out);
    case LayerKind::relu: return std::make_unique<Relu>(spec, input_shape, out);
    case LayerKind::dropout: return std::make_unique<Dropout>(spec, input_shape, out);
    case LayerKind::flatten: return std::make_unique<Flatten>(spec, input_shape, out);
    case LayerKind::softmax: return std::make_unique<Softmax>(spec, input_shape, out);
  }
  throw ShapeError("unknown layer kind");
}

}  // namespace daqn
