#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "daqn/nnkit/serialize.hpp"
#include "daqn/nnkit/tensor.hpp"

namespace daqn {

/// Hand-sign classes. The first three double as the game's actions.
enum class Glyph { rock = 0, paper = 1, scissors = 2, background = 3 };

inline constexpr int kHandGlyphs = 3;
inline constexpr int kGlyphClasses = 4;

std::string_view to_string(Glyph g);
std::optional<Glyph> parse_glyph(std::string_view name);

/// Procedural grayscale hand-sign images: a palm with fingers extended per
/// class, drawn over a smooth textured background under random pose and
/// lighting.
struct GlyphDuelConfig {
  int image_size = 32;
  double texture_level = 0.25;      // amplitude of the smooth background texture
  double brightness_jitter = 0.15;  // global gain uniform in [1 - j, 1 + j]
  double noise_std = 0.02;          // per-pixel Gaussian noise
  double max_translation = 0.2;     // fraction of the image side
  double max_rotation_deg = 30.0;
  double min_scale = 0.7;
  double max_scale = 1.1;
  double partial_probability = 0.3;  // chance of a half-formed hand
  std::uint64_t seed = 0;            // mixed into every render

  bool operator==(const GlyphDuelConfig&) const = default;
};

Json to_json(const GlyphDuelConfig& cfg);
GlyphDuelConfig glyph_config_from_json(const Json& j);

/// Everything random about one render.
struct GlyphPose {
  double tx = 0.0, ty = 0.0;  // translation in normalized units ([-1, 1] spans the image)
  double rotation_deg = 0.0;
  double scale = 1.0;
  Glyph from = Glyph::rock;  // posture the hand is changing from
  double formation = 1.0;    // 1 = completed sign
  double ink = 0.85;
  double base = 0.2;
  double gain = 1.0;
  std::uint64_t texture_seed = 0;
};

GlyphPose sample_pose(Glyph glyph, std::uint64_t pose_seed, const GlyphDuelConfig& cfg);

/// Stroke coverage in [0, 1] of the hand alone, [1, S, S]. Zero for background.
Tensor glyph_coverage(Glyph glyph, const GlyphPose& pose, const GlyphDuelConfig& cfg);

/// Full render for a pose, [1, S, S], pixels in [0, 1].
Tensor glyph_render(Glyph glyph, const GlyphPose& pose, const GlyphDuelConfig& cfg);

/// Deterministic render for (class, pose seed, config).
Tensor glyph_render(Glyph glyph, std::uint64_t pose_seed, const GlyphDuelConfig& cfg);

/// Off-domain images: a few bright random pen strokes on a dark plain field.
Tensor render_unrelated(std::uint64_t seed, const GlyphDuelConfig& cfg);

}  // namespace daqn
