#include "daqn/autoenc/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace daqn {
namespace {

void warp(const double* src, double* dst, int channels, int h, int w, double dx, double dy, double angle, bool flip) {
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double c = std::cos(angle), s = std::sin(angle);
  auto clamp = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double u = x - cx - dx, v = y - cy - dy;
      const double ru = c * u + s * v, rv = -s * u + c * v;
      double sx = (flip ? -ru : ru) + cx, sy = rv + cy;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      for (int ch = 0; ch < channels; ++ch) {
        const double* plane = src + static_cast<Index>(ch) * h * w;
        auto at = [&](int yy, int xx) { return plane[clamp(yy, h) * w + clamp(xx, w)]; };
        dst[(static_cast<Index>(ch) * h + y) * w + x] =
            (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
            fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
      }
    }
}

void augment_one(const double* src, double* dst, const Shape& shape, const AugmentSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int h = shape[1], w = shape[2];
  const double dx = spec.max_shift * w * unit(rng);
  const double dy = spec.max_shift * h * unit(rng);
  const double angle = spec.max_rotation_deg * unit(rng) * std::numbers::pi / 180.0;
  const bool flip = spec.flip && std::bernoulli_distribution(0.5)(rng);
  warp(src, dst, shape[0], h, w, dx, dy, angle, flip);
}

}  // namespace

Json to_json(const AugmentSpec& spec) {
  return Json{{"max_shift", spec.max_shift}, {"max_rotation_deg", spec.max_rotation_deg}, {"flip", spec.flip}};
}

AugmentSpec augment_spec_from_json(const Json& j) {
  AugmentSpec s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw ConfigError("augmentation must be an object");
  s.max_shift = j.value("max_shift", 0.0);
  s.max_rotation_deg = j.value("max_rotation_deg", 0.0);
  s.flip = j.value("flip", false);
  if (s.max_shift < 0.0 || s.max_shift >= 1.0) throw ConfigError("augmentation max_shift must lie in [0, 1)");
  if (s.max_rotation_deg < 0.0 || s.max_rotation_deg > 180.0)
    throw ConfigError("augmentation max_rotation_deg must lie in [0, 180]");
  return s;
}

Tensor augment_image(const Tensor& image, const AugmentSpec& spec, Rng& rng) {
  if (image.rank() != 3) throw ShapeError("augment_image expects [C, H, W], got " + to_string(image.shape()));
  Tensor out(image.shape());
  augment_one(image.data().data(), out.data().data(), image.shape(), spec, rng);
  return out;
}

void augment_columns(Eigen::Ref<Eigen::MatrixXd> cols, const Shape& sample_shape, const AugmentSpec& spec, Rng& rng) {
  if (!spec.enabled()) return;
  if (sample_shape.size() != 3)
    throw ShapeError("image augmentation needs [C, H, W] samples, got " + to_string(sample_shape));
  Eigen::VectorXd tmp(cols.rows());
  for (Index n = 0; n < cols.cols(); ++n) {
    augment_one(cols.col(n).data(), tmp.data(), sample_shape, spec, rng);
    cols.col(n) = tmp;
  }
}

}  // namespace daqn
