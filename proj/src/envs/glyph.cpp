#include "daqn/envs/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "daqn/nnkit/layers.hpp"

namespace daqn {
namespace {

constexpr std::array<std::string_view, kGlyphClasses> kGlyphNames{"rock", "paper", "scissors", "background"};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return splitmix(splitmix(splitmix(a) ^ b) ^ c);
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

struct Vec2 {
  double x, y;
};

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

struct Capsule {
  Vec2 a, b;
  double radius;
};

// Finger extension and direction (degrees from straight up), thumb first.
struct Posture {
  std::array<double, 5> extension;
  std::array<double, 5> angle;
};

constexpr std::array<double, 5> kFingerLength{0.38, 0.55, 0.6, 0.55, 0.42};

Posture posture_of(Glyph g) {
  switch (g) {
    case Glyph::paper: return {{1, 1, 1, 1, 1}, {-75, -30, -8, 14, 36}};
    case Glyph::scissors: return {{0, 1, 1, 0, 0}, {-75, -28, 8, 14, 36}};
    default: return {{0, 0, 0, 0, 0}, {-75, -30, -8, 14, 36}};
  }
}

constexpr Vec2 kPalmCenter{0.0, 0.2};
constexpr double kPalmRadius = 0.3;
constexpr double kFingerRadius = 0.075;

std::vector<Capsule> hand_capsules(Glyph glyph, const GlyphPose& pose) {
  const Posture to = posture_of(glyph), from = posture_of(pose.from);
  const double t = pose.formation;
  std::vector<Capsule> caps;
  caps.push_back({{0.0, 0.45}, {0.0, 1.1}, 0.16});  // wrist
  for (int f = 0; f < 5; ++f) {
    const double ext = (1.0 - t) * from.extension[f] + t * to.extension[f];
    const double ang = deg2rad((1.0 - t) * from.angle[f] + t * to.angle[f]);
    const Vec2 dir{std::sin(ang), -std::cos(ang)};
    const Vec2 base{kPalmCenter.x + 0.27 * dir.x, kPalmCenter.y + 0.27 * dir.y};
    const double len = ext * kFingerLength[static_cast<std::size_t>(f)];
    caps.push_back({base, {base.x + len * dir.x, base.y + len * dir.y}, kFingerRadius});
  }
  return caps;
}

// Smooth lattice noise in [0, 1]: bilinear interpolation of a random grid.
Eigen::MatrixXd value_noise(int size, int grid, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd lattice(grid, grid);
  for (Index i = 0; i < lattice.size(); ++i) lattice.data()[i] = u(rng);
  Eigen::MatrixXd out(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double gx = (x + 0.5) / size * (grid - 1), gy = (y + 0.5) / size * (grid - 1);
      const int x0 = std::min(static_cast<int>(gx), grid - 2), y0 = std::min(static_cast<int>(gy), grid - 2);
      const double fx = gx - x0, fy = gy - y0;
      out(y, x) = (1 - fy) * ((1 - fx) * lattice(y0, x0) + fx * lattice(y0, x0 + 1)) +
                  fy * ((1 - fx) * lattice(y0 + 1, x0) + fx * lattice(y0 + 1, x0 + 1));
    }
  return out;
}

// Canonical-frame coordinates of pixel centres after undoing the pose.
template <class F>
void for_each_pixel(const GlyphPose& pose, int size, F&& f) {
  const double c = std::cos(deg2rad(pose.rotation_deg)), s = std::sin(deg2rad(pose.rotation_deg));
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double px = ((x + 0.5) / size) * 2.0 - 1.0 - pose.tx;
      const double py = ((y + 0.5) / size) * 2.0 - 1.0 - pose.ty;
      const Vec2 q{(c * px + s * py) / pose.scale, (-s * px + c * py) / pose.scale};
      f(y, x, q);
    }
}

void finish(Tensor& img, const Eigen::MatrixXd& coverage, const Eigen::MatrixXd& background, double ink, double gain,
            double noise_std, Rng& rng) {
  std::normal_distribution<double> noise(0.0, noise_std);
  const int size = static_cast<int>(coverage.rows());
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double cov = coverage(y, x);
      double v = (background(y, x) * (1.0 - cov) + ink * cov) * gain;
      if (noise_std > 0) v += noise(rng);
      img[static_cast<Index>(y) * size + x] = std::clamp(v, 0.0, 1.0);
    }
}

}  // namespace

std::string_view to_string(Glyph g) { return kGlyphNames[static_cast<std::size_t>(g)]; }

std::optional<Glyph> parse_glyph(std::string_view name) {
  for (std::size_t i = 0; i < kGlyphNames.size(); ++i)
    if (kGlyphNames[i] == name) return static_cast<Glyph>(i);
  return std::nullopt;
}

Json to_json(const GlyphDuelConfig& c) {
  return Json{{"image_size", c.image_size},
              {"texture_level", c.texture_level},
              {"brightness_jitter", c.brightness_jitter},
              {"noise_std", c.noise_std},
              {"max_translation", c.max_translation},
              {"max_rotation_deg", c.max_rotation_deg},
              {"min_scale", c.min_scale},
              {"max_scale", c.max_scale},
              {"partial_probability", c.partial_probability},
              {"seed", c.seed}};
}

GlyphDuelConfig glyph_config_from_json(const Json& j) {
  GlyphDuelConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError("glyph config must be an object");
  c.image_size = j.value("image_size", c.image_size);
  c.texture_level = j.value("texture_level", c.texture_level);
  c.brightness_jitter = j.value("brightness_jitter", c.brightness_jitter);
  c.noise_std = j.value("noise_std", c.noise_std);
  c.max_translation = j.value("max_translation", c.max_translation);
  c.max_rotation_deg = j.value("max_rotation_deg", c.max_rotation_deg);
  c.min_scale = j.value("min_scale", c.min_scale);
  c.max_scale = j.value("max_scale", c.max_scale);
  c.partial_probability = j.value("partial_probability", c.partial_probability);
  c.seed = j.value("seed", c.seed);
  if (c.image_size < 8) throw ConfigError("glyph image_size must be >= 8");
  if (c.min_scale <= 0 || c.max_scale < c.min_scale) throw ConfigError("glyph scale range is invalid");
  if (c.partial_probability < 0 || c.partial_probability > 1)
    throw ConfigError("glyph partial_probability must lie in [0, 1]");
  return c;
}

GlyphPose sample_pose(Glyph glyph, std::uint64_t pose_seed, const GlyphDuelConfig& cfg) {
  Rng rng(mix(cfg.seed, pose_seed, static_cast<std::uint64_t>(glyph) + 1));
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  GlyphPose p;
  p.tx = 2.0 * cfg.max_translation * u(rng);
  p.ty = 2.0 * cfg.max_translation * u(rng);
  p.rotation_deg = cfg.max_rotation_deg * u(rng);
  p.scale = cfg.min_scale + (cfg.max_scale - cfg.min_scale) * unit(rng);
  p.from = glyph;
  p.formation = 1.0;
  if (glyph != Glyph::background && unit(rng) < cfg.partial_probability) {
    p.from = static_cast<Glyph>((static_cast<int>(glyph) + 1 + static_cast<int>(unit(rng) * 2.0)) % kHandGlyphs);
    p.formation = 0.6 + 0.4 * unit(rng);
  }
  p.ink = 0.75 + 0.2 * unit(rng);
  p.base = 0.1 + 0.2 * unit(rng);
  p.gain = 1.0 + cfg.brightness_jitter * u(rng);
  p.texture_seed = rng();
  return p;
}

Tensor glyph_coverage(Glyph glyph, const GlyphPose& pose, const GlyphDuelConfig& cfg) {
  const int size = cfg.image_size;
  Tensor cov({1, size, size});
  if (glyph == Glyph::background) return cov;
  const auto caps = hand_capsules(glyph, pose);
  const double to_pixels = pose.scale * size / 2.0;
  for_each_pixel(pose, size, [&](int y, int x, Vec2 q) {
    double d = std::hypot(q.x - kPalmCenter.x, q.y - kPalmCenter.y) - kPalmRadius;
    for (const auto& c : caps) d = std::min(d, segment_distance(q, c.a, c.b) - c.radius);
    cov[static_cast<Index>(y) * size + x] = std::clamp(0.5 - d * to_pixels, 0.0, 1.0);
  });
  return cov;
}

Tensor glyph_render(Glyph glyph, const GlyphPose& pose, const GlyphDuelConfig& cfg) {
  const int size = cfg.image_size;
  Rng rng(pose.texture_seed);
  Eigen::MatrixXd bg = value_noise(size, 5, rng) + 0.5 * value_noise(size, 9, rng);
  bg = (bg / 1.5) * cfg.texture_level;
  bg.array() += pose.base;
  const Tensor cov = glyph_coverage(glyph, pose, cfg);
  const Eigen::MatrixXd cov_m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cov.data().data(), size, size);
  Tensor img({1, size, size});
  finish(img, cov_m, bg, pose.ink, pose.gain, cfg.noise_std, rng);
  return img;
}

Tensor glyph_render(Glyph glyph, std::uint64_t pose_seed, const GlyphDuelConfig& cfg) {
  return glyph_render(glyph, sample_pose(glyph, pose_seed, cfg), cfg);
}

Tensor render_unrelated(std::uint64_t seed, const GlyphDuelConfig& cfg) {
  const int size = cfg.image_size;
  Rng rng(mix(cfg.seed, seed, 0x5eedULL));
  std::uniform_real_distribution<double> u(-0.7, 0.7), unit(0.0, 1.0);
  std::uniform_int_distribution<int> n_strokes(1, 3);
  // Quadratic Bezier pen strokes, flattened to short segments.
  std::vector<Capsule> segs;
  const int strokes = n_strokes(rng);
  for (int s = 0; s < strokes; ++s) {
    const Vec2 p0{u(rng), u(rng)}, p1{u(rng), u(rng)}, p2{u(rng), u(rng)};
    const double r = 0.06 + 0.04 * unit(rng);
    Vec2 prev = p0;
    for (int k = 1; k <= 12; ++k) {
      const double t = k / 12.0, a = (1 - t) * (1 - t), b = 2 * (1 - t) * t, c = t * t;
      const Vec2 cur{a * p0.x + b * p1.x + c * p2.x, a * p0.y + b * p1.y + c * p2.y};
      segs.push_back({prev, cur, r});
      prev = cur;
    }
  }
  Eigen::MatrixXd cov(size, size);
  GlyphPose identity;
  for_each_pixel(identity, size, [&](int y, int x, Vec2 q) {
    double d = 1e9;
    for (const auto& c : segs) d = std::min(d, segment_distance(q, c.a, c.b) - c.radius);
    cov(y, x) = std::clamp(0.5 - d * size / 2.0, 0.0, 1.0);
  });
  const Eigen::MatrixXd bg = Eigen::MatrixXd::Constant(size, size, 0.05 * unit(rng));
  Tensor img({1, size, size});
  finish(img, cov, bg, 0.8 + 0.2 * unit(rng), 1.0, cfg.noise_std, rng);
  return img;
}

}  // namespace daqn
